//! Fixed-point math kernels: parameters, lookup tables, cleartext reference
//! pipelines, and accuracy measurement in units of the output's last place.

pub mod reference;
pub mod tables;

pub use reference::SigmoidTables;
pub use tables::Lut;

use crate::error::Error;
use crate::oracle::{self, Dd};
use crate::ring::{int_of, FixFmt};
use std::fmt;
use std::str::FromStr;

/// The math functions exposed by the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MathFn {
    Exp,
    Sigmoid,
    Tanh,
    Rsqrt,
}

impl MathFn {
    pub const ALL: [MathFn; 4] = [MathFn::Exp, MathFn::Sigmoid, MathFn::Tanh, MathFn::Rsqrt];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            MathFn::Exp => "exp",
            MathFn::Sigmoid => "sigmoid",
            MathFn::Tanh => "tanh",
            MathFn::Rsqrt => "rsqrt",
        }
    }

    /// Whether the function reads its input as signed.
    #[must_use]
    pub fn input_signed(self) -> bool {
        matches!(self, MathFn::Sigmoid | MathFn::Tanh)
    }

    /// Whether the function's output is signed.
    #[must_use]
    pub fn output_signed(self) -> bool {
        matches!(self, MathFn::Tanh)
    }

    /// The worst-case error bound, in units of the output's last place, that
    /// the accuracy sweeps hold this function to.
    #[must_use]
    pub fn ulp_bound(self) -> u64 {
        match self {
            MathFn::Exp | MathFn::Sigmoid => 3,
            MathFn::Tanh | MathFn::Rsqrt => 4,
        }
    }
}

impl fmt::Display for MathFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MathFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        MathFn::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown function {s:?}")))
    }
}

/// Full parameter set for one kernel instance.
///
/// `m`/`s_in` are the input width and scale, `n`/`s_out` the output width and
/// scale. `d` is the digit size of the exponential's input decomposition,
/// `g` the index width of the reciprocal(-square-root) seed tables, and `t`
/// the number of refinement iterations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MathParams {
    pub m: u32,
    pub s_in: u32,
    pub n: u32,
    pub s_out: u32,
    pub d: u32,
    pub g: u32,
    pub t: u32,
}

impl MathParams {
    /// Default parameter choices for a function at the given widths and
    /// scales: digit size 8, seed precision tied to the output scale, one
    /// refinement round for the reciprocal square root and none elsewhere.
    #[must_use]
    pub fn for_fn(f: MathFn, m: u32, s_in: u32, n: u32, s_out: u32) -> MathParams {
        let p = match f {
            MathFn::Exp => MathParams { m, s_in, n, s_out, d: 8, g: 0, t: 0 },
            MathFn::Sigmoid | MathFn::Tanh => {
                MathParams { m, s_in, n, s_out, d: 8, g: (s_out - 1) / 2, t: 0 }
            }
            MathFn::Rsqrt => MathParams { m, s_in, n, s_out, d: 8, g: s_out.div_ceil(2), t: 1 },
        };
        p.validate(f);
        p
    }

    fn validate(&self, f: MathFn) {
        assert!(self.m >= 2 && self.m <= 64 && self.n >= 2 && self.n <= 64);
        assert!(self.s_in < self.m && self.s_out < self.n);
        match f {
            MathFn::Exp | MathFn::Sigmoid | MathFn::Tanh => {
                assert!(self.d >= 1 && self.m % self.d == 0, "digit size must divide input width");
            }
            MathFn::Rsqrt => {
                assert_eq!(self.m, self.n, "reciprocal square root keeps one ring width");
                assert!(self.s_in <= self.m - 2);
            }
        }
        if matches!(f, MathFn::Sigmoid | MathFn::Tanh | MathFn::Rsqrt) {
            assert!(self.s_out >= 4, "output scale too small for the seed tables");
            assert!(self.g >= 1 && self.g + 2 <= self.s_out);
        }
        if matches!(f, MathFn::Tanh) {
            assert!(self.s_in >= 1);
        }
    }
}

/// A math function bound to parameters and its precomputed tables.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub func: MathFn,
    pub params: MathParams,
    tables: KernelTables,
}

#[derive(Clone, Debug)]
enum KernelTables {
    Exp(Vec<Lut>),
    Sigmoid(SigmoidTables),
    Rsqrt(Lut),
}

impl Kernel {
    #[must_use]
    pub fn new(func: MathFn, m: u32, s_in: u32, n: u32, s_out: u32) -> Kernel {
        Kernel::with_params(func, MathParams::for_fn(func, m, s_in, n, s_out))
    }

    #[must_use]
    pub fn with_params(func: MathFn, params: MathParams) -> Kernel {
        params.validate(func);
        let tables = match func {
            MathFn::Exp => {
                KernelTables::Exp(tables::exp_digit_tables(params.m, params.s_in, params.s_out, params.d))
            }
            MathFn::Sigmoid | MathFn::Tanh => {
                // The tanh identity halves the effective input scale.
                let s_eff = if func == MathFn::Tanh { params.s_in - 1 } else { params.s_in };
                KernelTables::Sigmoid(SigmoidTables {
                    exp: tables::exp_digit_tables(params.m, s_eff, params.s_out, params.d),
                    recip: tables::recip_table(params.g),
                    is_two: tables::is_two_table(),
                })
            }
            MathFn::Rsqrt => KernelTables::Rsqrt(tables::rsqrt_table(params.g)),
        };
        Kernel { func, params, tables }
    }

    /// Cleartext fixed-point evaluation (the protocol-identical reference).
    #[must_use]
    pub fn eval_ref(&self, x: u64) -> u64 {
        let p = &self.params;
        match (&self.tables, self.func) {
            (KernelTables::Exp(luts), _) => reference::rexp_ref(luts, p, x),
            (KernelTables::Sigmoid(tabs), MathFn::Sigmoid) => reference::sigmoid_ref(tabs, p, x),
            (KernelTables::Sigmoid(tabs), MathFn::Tanh) => reference::tanh_ref(tabs, p, x),
            (KernelTables::Rsqrt(seed), _) => reference::rsqrt_ref(seed, p, x),
            _ => unreachable!(),
        }
    }

    /// Real-valued oracle evaluation of the function at ring input `x`.
    #[must_use]
    pub fn oracle(&self, x: u64) -> Dd {
        let p = &self.params;
        let scale = (1u64 << p.s_in) as f64;
        match self.func {
            MathFn::Exp => oracle::exp_neg(x as f64 / scale),
            MathFn::Sigmoid => oracle::sigmoid(int_of(x, p.m) as f64 / scale),
            MathFn::Tanh => oracle::tanh(int_of(x, p.m) as f64 / scale),
            MathFn::Rsqrt => oracle::rsqrt(x as f64 / scale),
        }
    }

    /// Error of output `y` for input `x`, in units of the output's last
    /// place: `|y - f(x) * 2^{s_out}|`, rounded down.
    pub fn ulp(&self, x: u64, y: u64) -> Result<u64, Error> {
        let fmt = FixFmt { width: self.params.n, scale: self.params.s_out };
        ulp_error(y, fmt, self.func.output_signed(), self.oracle(x))
    }

    /// The smallest valid input: zero is outside the reciprocal square
    /// root's domain, everything else accepts the full ring.
    #[must_use]
    pub fn min_input(&self) -> u64 {
        u64::from(self.func == MathFn::Rsqrt)
    }

    pub(crate) fn sigmoid_tables(&self) -> &SigmoidTables {
        match &self.tables {
            KernelTables::Sigmoid(t) => t,
            _ => panic!("not a sigmoid-family kernel"),
        }
    }

    pub(crate) fn exp_tables(&self) -> &[Lut] {
        match &self.tables {
            KernelTables::Exp(t) => t,
            KernelTables::Sigmoid(t) => &t.exp,
            KernelTables::Rsqrt { .. } => panic!("kernel has no exponential tables"),
        }
    }

    pub(crate) fn rsqrt_seed(&self) -> &Lut {
        match &self.tables {
            KernelTables::Rsqrt(seed) => seed,
            _ => panic!("not a reciprocal-square-root kernel"),
        }
    }
}

/// Digit widths (low to high) splitting an `l`-bit value into `d`-bit digits
/// with a short tail.
#[must_use]
pub fn digit_widths(l: u32, d: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(l.div_ceil(d) as usize);
    let mut rest = l;
    while rest > 0 {
        let w = rest.min(d);
        out.push(w);
        rest -= w;
    }
    out
}

/// Distance from ring output `y` (interpreted per `signed` in format `fmt`)
/// to the real value `r`, in units of the last place: `floor(|y - r * 2^s|)`.
///
/// Errors if the distance sits within a `1e-25` relative margin of an
/// integer boundary, where the oracle's own precision (~1e-30 relative)
/// could flip the floor; no grid point of the shipped parameter sets does.
pub fn ulp_error(y: u64, fmt: FixFmt, signed: bool, r: Dd) -> Result<u64, Error> {
    let yv = if signed { Dd::from_i64(int_of(y, fmt.width)) } else { Dd::from_u64(y) };
    let delta = yv.sub(r.scale_pow2(fmt.scale as i32)).abs();
    oracle::floor_with_margin(delta, 1e-25).ok_or(Error::OracleMargin)
}
