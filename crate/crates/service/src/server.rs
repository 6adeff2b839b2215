use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::thread;

use serde::Serialize;

use crate::pdp::Pdp;
use crate::wire::WireResponse;

/// TCP listener speaking newline-delimited JSON, one thread per
/// connection.
#[derive(Debug)]
pub struct Server {
    listener: TcpListener,
    pdp: Pdp,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, pdp: Pdp) -> io::Result<Self> {
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            pdp,
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until the listener fails.
    pub fn run(self) -> io::Result<()> {
        log::info!("listening on {}", self.local_addr()?);
        for stream in self.listener.incoming() {
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            let pdp = self.pdp.clone();
            thread::spawn(move || {
                let peer = stream.peer_addr().ok();
                if let Err(e) = serve_connection(&pdp, stream) {
                    log::warn!("connection {peer:?}: {e}");
                }
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<SocketAddr> {
        let addr = self.local_addr()?;
        thread::spawn(move || self.run());
        Ok(addr)
    }
}

/// Reads request lines until EOF, answering each in order. Blank lines are
/// ignored.
pub fn serve_connection(pdp: &Pdp, stream: TcpStream) -> io::Result<()> {
    let reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let response = pdp.handle_line(&line);
        log::debug!("{} -> ok={}", line, response.ok);
        write_line(&mut writer, &response)?;
        writer.flush()?;
    }
    Ok(())
}

fn write_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")
}

/// Blocking client holding one connection.
#[derive(Debug)]
pub struct Client {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let stream = TcpStream::connect(addr)?;
        Ok(Client {
            reader: BufReader::new(stream.try_clone()?),
            writer: BufWriter::new(stream),
        })
    }

    /// Sends a raw line and reads one response line.
    pub fn call_raw(&mut self, line: &str) -> io::Result<WireResponse> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        let mut buf = String::new();
        if self.reader.read_line(&mut buf)? == 0 {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "server closed the connection"));
        }
        serde_json::from_str(&buf).map_err(io::Error::from)
    }

    pub fn call<T: Serialize>(&mut self, request: &T) -> io::Result<WireResponse> {
        let line = serde_json::to_string(request)?;
        self.call_raw(&line)
    }
}
