//! Sessions between the two parties: wires, negotiation, and exact
//! communication metering.
//!
//! Protocol code is written in single-program style: both parties run the
//! same functions on a [`Session`] whose [`Role`] decides who sends what.
//! Every payload is accounted bit-exactly (frame overhead excluded), and
//! rounds are counted by direction changes — consecutive messages in the
//! same direction coalesce into one round, a bidirectional [`Session::swap`]
//! is one round.

pub mod pack;
pub mod wire;

pub use pack::{BitReader, BitWriter};
pub use wire::{inproc_pair, InProcWire, TcpWire, Wire};

use crate::error::{Error, Result};
use crate::prg::splitmix64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Party identity. The protocols are asymmetric only where a comment says
/// so; by convention the first party listens and the second connects when
/// running over TCP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    P0,
    P1,
}

impl Role {
    #[inline]
    #[must_use]
    pub fn other(self) -> Role {
        match self {
            Role::P0 => Role::P1,
            Role::P1 => Role::P0,
        }
    }

    #[inline]
    #[must_use]
    pub fn index(self) -> usize {
        match self {
            Role::P0 => 0,
            Role::P1 => 1,
        }
    }
}

/// Bits attributed to one meter scope.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScopeBits {
    pub sent: u64,
    pub received: u64,
}

/// Exact communication accounting, identical on both parties: total bits in
/// each direction, rounds, and a per-scope breakdown keyed by the label
/// stack protocols push via [`Session::scope`].
#[derive(Clone, Debug, Default)]
pub struct CostMeter {
    pub bits_sent: u64,
    pub bits_received: u64,
    pub rounds: u64,
    pub by_scope: BTreeMap<String, ScopeBits>,
    last_sender: Option<Role>,
    path: String,
}

impl CostMeter {
    /// Total communication, both directions.
    #[must_use]
    pub fn total_bits(&self) -> u64 {
        self.bits_sent + self.bits_received
    }

    fn on_message(&mut self, sender: Role, me: Role, bits: u64) {
        if self.last_sender != Some(sender) {
            self.rounds += 1;
            self.last_sender = Some(sender);
        }
        let scope = self.by_scope.entry(self.path.clone()).or_default();
        if sender == me {
            self.bits_sent += bits;
            scope.sent += bits;
        } else {
            self.bits_received += bits;
            scope.received += bits;
        }
    }

    fn on_swap(&mut self, bits_out: u64, bits_in: u64) {
        self.rounds += 1;
        self.last_sender = None;
        self.bits_sent += bits_out;
        self.bits_received += bits_in;
        let scope = self.by_scope.entry(self.path.clone()).or_default();
        scope.sent += bits_out;
        scope.received += bits_in;
    }
}

const MAGIC: &[u8; 4] = b"MXBW";
const VERSION: u16 = 1;

/// One party's end of an established protocol session.
pub struct Session {
    pub role: Role,
    pub lambda: u32,
    pub meter: CostMeter,
    wire: Box<dyn Wire>,
    rng: ChaCha12Rng,
    /// Shared mask seed for simulated transfers (agreed in the handshake).
    pub(crate) ot_seed: u64,
    /// Transfer counter, advanced in lockstep by both parties.
    pub(crate) ot_counter: u64,
}

impl Session {
    /// Exchange and validate session parameters over a fresh wire.
    ///
    /// `seed` drives this party's private randomness and its half of the
    /// shared mask seed; the handshake itself is not metered.
    pub fn establish(role: Role, mut wire: Box<dyn Wire>, lambda: u32, seed: u64) -> Result<Session> {
        assert!((80..=256).contains(&lambda), "security parameter {lambda} out of range");
        let my_nonce = splitmix64(seed ^ splitmix64(role.index() as u64 + 1));
        let mut hello = Vec::with_capacity(18);
        hello.extend_from_slice(MAGIC);
        hello.extend_from_slice(&VERSION.to_le_bytes());
        hello.extend_from_slice(&lambda.to_le_bytes());
        hello.extend_from_slice(&my_nonce.to_le_bytes());
        wire.send_frame(wire::label_id("handshake"), &hello)?;
        let (label, peer) = wire.recv_frame()?;
        if label != wire::label_id("handshake") || peer.len() != 18 || &peer[0..4] != MAGIC {
            return Err(Error::Negotiation("peer did not open with a handshake".into()));
        }
        let peer_version = u16::from_le_bytes(peer[4..6].try_into().unwrap());
        if peer_version != VERSION {
            return Err(Error::Negotiation(format!(
                "protocol version mismatch: ours {VERSION}, peer {peer_version}"
            )));
        }
        let peer_lambda = u32::from_le_bytes(peer[6..10].try_into().unwrap());
        if peer_lambda != lambda {
            return Err(Error::Negotiation(format!(
                "security parameter mismatch: ours {lambda}, peer {peer_lambda}"
            )));
        }
        let peer_nonce = u64::from_le_bytes(peer[10..18].try_into().unwrap());
        let mut rng_seed = [0u8; 32];
        rng_seed[0..8].copy_from_slice(&my_nonce.to_le_bytes());
        rng_seed[8..16].copy_from_slice(&splitmix64(my_nonce).to_le_bytes());
        Ok(Session {
            role,
            lambda,
            meter: CostMeter::default(),
            wire,
            rng: ChaCha12Rng::from_seed(rng_seed),
            ot_seed: my_nonce ^ peer_nonce ^ splitmix64(lambda as u64),
            ot_counter: 0,
        })
    }

    /// This party's private randomness.
    #[inline]
    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }

    /// Send `bits` bits packed into `payload`.
    pub fn send(&mut self, label: &'static str, payload: &[u8], bits: u64) -> Result<()> {
        debug_assert_eq!(payload.len() as u64, bits.div_ceil(8), "payload/bit count mismatch");
        self.meter.on_message(self.role, self.role, bits);
        self.wire.send_frame(wire::label_id(label), payload)
    }

    /// Receive a message that must carry `label` and exactly `bits` bits.
    pub fn recv(&mut self, label: &'static str, bits: u64) -> Result<Vec<u8>> {
        let (got_id, payload) = self.wire.recv_frame()?;
        if got_id != wire::label_id(label) {
            return Err(Error::Desync {
                expected: label.to_string(),
                got: wire::label_name(got_id).to_string(),
            });
        }
        if payload.len() as u64 != bits.div_ceil(8) {
            return Err(Error::Desync {
                expected: format!("{label} ({bits} bits)"),
                got: format!("{label} ({} bytes)", payload.len()),
            });
        }
        self.meter.on_message(self.role.other(), self.role, bits);
        Ok(payload)
    }

    /// Simultaneous exchange: both parties send `bits_out` and receive
    /// `bits_in`, in one round. The first party writes before reading so the
    /// exchange cannot deadlock on a stream transport.
    pub fn swap(&mut self, payload: &[u8], bits_out: u64, bits_in: u64) -> Result<Vec<u8>> {
        debug_assert_eq!(payload.len() as u64, bits_out.div_ceil(8));
        let id = wire::label_id("swap");
        let got = match self.role {
            Role::P0 => {
                self.wire.send_frame(id, payload)?;
                self.wire.recv_frame()?
            }
            Role::P1 => {
                let got = self.wire.recv_frame()?;
                self.wire.send_frame(id, payload)?;
                got
            }
        };
        if got.0 != id {
            return Err(Error::Desync {
                expected: "swap".to_string(),
                got: wire::label_name(got.0).to_string(),
            });
        }
        if got.1.len() as u64 != bits_in.div_ceil(8) {
            return Err(Error::Desync {
                expected: format!("swap ({bits_in} bits)"),
                got: format!("swap ({} bytes)", got.1.len()),
            });
        }
        self.meter.on_swap(bits_out, bits_in);
        Ok(got.1)
    }

    /// Run `f` with `name` pushed onto the meter's scope path.
    pub fn scope<R>(&mut self, name: &str, f: impl FnOnce(&mut Session) -> R) -> R {
        let saved = self.meter.path.len();
        if !self.meter.path.is_empty() {
            self.meter.path.push('.');
        }
        self.meter.path.push_str(name);
        let out = f(self);
        self.meter.path.truncate(saved);
        out
    }

    /// Reset the meter (e.g. between measured phases); the scope path and
    /// round-coalescing state clear too.
    pub fn reset_meter(&mut self) {
        self.meter = CostMeter::default();
    }
}

/// Run a two-party protocol in-process: `f0` as the first party on the
/// current thread, `f1` as the second on a scoped thread.
pub fn run_pair<A, B>(
    lambda: u32,
    seed: u64,
    f0: impl FnOnce(&mut Session) -> A,
    f1: impl FnOnce(&mut Session) -> B + Send,
) -> (A, B)
where
    B: Send,
{
    let (w0, w1) = inproc_pair();
    std::thread::scope(|scope| {
        let h = scope.spawn(move || {
            let mut s1 = Session::establish(Role::P1, Box::new(w1), lambda, splitmix64(seed ^ 1))
                .expect("handshake");
            f1(&mut s1)
        });
        let mut s0 = Session::establish(Role::P0, Box::new(w0), lambda, splitmix64(seed))
            .expect("handshake");
        let a = f0(&mut s0);
        let b = h.join().expect("second party panicked");
        (a, b)
    })
}
