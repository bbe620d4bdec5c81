//! Byte transports between the two parties.
//!
//! A frame is a 4-byte little-endian payload length, a 2-byte label
//! identifier, and the payload. The label identifies the protocol step that
//! produced the message so that a desynchronized peer is caught at the first
//! mismatched frame instead of corrupting shares silently. Frame overhead
//! (length and label) is bookkeeping, not protocol communication, and is
//! excluded from the cost meters.

use crate::error::{Error, Result};
use std::io::{BufReader, BufWriter, Read, Write};
use std::net::TcpStream;
use std::sync::mpsc;

/// Wire labels for every message kind a protocol can emit. The identifier
/// sent on the wire is the index into this table, so the table is append-only
/// within a protocol version.
pub const LABELS: &[&str] = &[
    "handshake",
    "ot.receiver",
    "ot.sender",
    "open",
    "swap",
];

/// Index of a label in [`LABELS`].
#[must_use]
pub fn label_id(name: &str) -> u16 {
    LABELS
        .iter()
        .position(|&l| l == name)
        .unwrap_or_else(|| panic!("unregistered wire label {name:?}")) as u16
}

#[must_use]
pub fn label_name(id: u16) -> &'static str {
    LABELS.get(id as usize).copied().unwrap_or("<unknown>")
}

/// A duplex byte channel carrying labeled frames.
pub trait Wire: Send {
    fn send_frame(&mut self, label: u16, payload: &[u8]) -> Result<()>;
    fn recv_frame(&mut self) -> Result<(u16, Vec<u8>)>;
}

/// In-process wire over unbounded channels, for tests and single-process
/// runs of both parties.
pub struct InProcWire {
    tx: mpsc::Sender<(u16, Vec<u8>)>,
    rx: mpsc::Receiver<(u16, Vec<u8>)>,
}

/// A connected pair of in-process wires.
#[must_use]
pub fn inproc_pair() -> (InProcWire, InProcWire) {
    let (tx0, rx1) = mpsc::channel();
    let (tx1, rx0) = mpsc::channel();
    (InProcWire { tx: tx0, rx: rx0 }, InProcWire { tx: tx1, rx: rx1 })
}

impl Wire for InProcWire {
    fn send_frame(&mut self, label: u16, payload: &[u8]) -> Result<()> {
        self.tx.send((label, payload.to_vec())).map_err(|_| Error::PeerClosed)
    }

    fn recv_frame(&mut self) -> Result<(u16, Vec<u8>)> {
        self.rx.recv().map_err(|_| Error::PeerClosed)
    }
}

/// TCP wire with buffered writes; each frame is flushed eagerly so that a
/// party switching from sending to receiving never deadlocks.
pub struct TcpWire {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl TcpWire {
    pub fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        let writer = BufWriter::new(stream);
        Ok(TcpWire { reader, writer })
    }
}

impl Wire for TcpWire {
    fn send_frame(&mut self, label: u16, payload: &[u8]) -> Result<()> {
        let len: u32 = payload
            .len()
            .try_into()
            .map_err(|_| Error::Resource("frame exceeds 4 GiB".into()))?;
        self.writer.write_all(&len.to_le_bytes())?;
        self.writer.write_all(&label.to_le_bytes())?;
        self.writer.write_all(payload)?;
        self.writer.flush()?;
        Ok(())
    }

    fn recv_frame(&mut self) -> Result<(u16, Vec<u8>)> {
        let mut head = [0u8; 6];
        if let Err(e) = self.reader.read_exact(&mut head) {
            return Err(if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::PeerClosed
            } else {
                Error::Io(e)
            });
        }
        let len = u32::from_le_bytes(head[0..4].try_into().unwrap()) as usize;
        let label = u16::from_le_bytes(head[4..6].try_into().unwrap());
        let mut payload = vec![0u8; len];
        self.reader.read_exact(&mut payload)?;
        Ok((label, payload))
    }
}
