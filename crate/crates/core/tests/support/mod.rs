pub mod hl_oracle;
