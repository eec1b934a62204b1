//! Real-number backends for the spectral iteration.
//!
//! The scalar recursion has to resolve stopping thresholds well below the
//! resolution of `f64` (down to 1e-25), so the solver is generic over [`Real`].
//! Three backends are provided:
//!
//! | backend | mantissa | unit roundoff |
//! |---------|----------|---------------|
//! | `f64` | 53 bits | ~1.1e-16 |
//! | [`DoubleDouble`] | ~106 bits | ~1e-32 |
//! | [`MpFloat`] | caller-chosen | 2^-bits |

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use dashu_float::ops::SquareRoot;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub trait Real:
    Clone
    + PartialOrd
    + Send
    + Sync
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Whatever the type needs to materialize a constant (the bit count for
    /// arbitrary precision, nothing for the fixed-width types).
    type Context: Copy + Send + Sync;

    fn from_f64(x: f64, ctx: Self::Context) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
}

impl Real for f64 {
    type Context = ();

    fn from_f64(x: f64, _: ()) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl std::ops::Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        // long division: three f64 quotient digits
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Real for DoubleDouble {
    type Context = ();

    fn from_f64(x: f64, _: ()) -> Self {
        DoubleDouble::from(x)
    }
    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }
    fn sqrt(&self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { DoubleDouble::ZERO } else { DoubleDouble::from(f64::NAN) };
        }
        // one Newton step from the f64 root
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (*self - DoubleDouble { hi: p, lo: e }).hi;
        DoubleDouble::new(x, r / (2.0 * x))
    }
    fn abs(&self) -> Self {
        if self.hi < 0.0 {
            -*self
        } else {
            *self
        }
    }
}

type Big = FBig<HalfEven, 2>;

/// Binary floating point with a fixed, caller-chosen mantissa width.
#[derive(Clone, PartialEq)]
pub struct MpFloat(Big);

impl MpFloat {
    pub fn precision(&self) -> usize {
        self.0.precision()
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({:e}, {} bits)", self.to_f64(), self.precision())
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                MpFloat(&self.0 $op &rhs.0)
            }
        }
    };
}
mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl Real for MpFloat {
    type Context = usize;

    fn from_f64(x: f64, bits: usize) -> Self {
        // every finite f64 converts exactly; widen to the working precision
        let v = Big::try_from(x).expect("finite f64");
        MpFloat(v.with_precision(bits).value())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn sqrt(&self) -> Self {
        MpFloat(self.0.sqrt())
    }
    fn abs(&self) -> Self {
        if self.0 < Big::ZERO {
            MpFloat(-self.0.clone())
        } else {
            self.clone()
        }
    }
}
