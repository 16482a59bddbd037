//! Globally adaptive Gauss–Legendre quadrature, generic over the number type.
//!
//! The same code runs in `f64`, in double-double ([`twofloat::TwoFloat`]) and
//! in 320-bit fixed point ([`Fixed`]). The wider types are needed when an
//! integral is many orders of magnitude smaller than the integral of the
//! absolute value of its integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

/// Default number of nodes in the fixed-order kernel.
pub const DEFAULT_ORDER: usize = 20;

/// Default cap on the number of subintervals.
pub const DEFAULT_MAX_INTERVALS: usize = 20_000;

/// Minimal real-number interface needed by the integrator and by the
/// polynomial recurrences evaluated inside integrands.
pub trait Real:
    Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Quotient accurate to the working precision.
    fn quot(&self, rhs: &Self) -> Self;
    fn sqrt(&self) -> Self;
    /// Spacing of representable values near 1.
    fn epsilon() -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    fn abs(&self) -> Self {
        if *self < Self::from_f64(0.0) {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_f64(1.0);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn quot(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(&self) -> f64 {
        self.hi() + self.lo()
    }
    /// `twofloat`'s own quotient is only accurate to `f64` precision; its
    /// product is exact enough that one residual step `q + (a - q b) / b`
    /// restores double-double accuracy.
    fn quot(&self, rhs: &Self) -> Self {
        let q = *self / *rhs;
        q + (*self - q * *rhs) / *rhs
    }
    fn sqrt(&self) -> Self {
        TwoFloat::sqrt(*self)
    }
    fn epsilon() -> Self {
        TwoFloat::from(f64::EPSILON * f64::EPSILON)
    }
}

/// Binary digits after the point in [`Fixed`].
pub const FIXED_FRAC_BITS: u32 = 320;

/// Signed fixed-point number with [`FIXED_FRAC_BITS`] fractional bits.
/// Products and quotients truncate, so absolute error is about `2^-320`
/// per operation regardless of magnitude.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl Mul for Fixed {
    type Output = Fixed;
    fn mul(self, rhs: Fixed) -> Fixed {
        Fixed((self.0 * rhs.0) >> FIXED_FRAC_BITS)
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl Real for Fixed {
    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "cannot represent {x} in fixed point");
        if x == 0.0 {
            return Fixed(BigInt::zero());
        }
        // x = m * 2^e exactly, with m an integer of at most 53 bits.
        let bits = x.abs().to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
        let shift = e + i64::from(FIXED_FRAC_BITS);
        let mag = if shift >= 0 { BigInt::from(m) << shift as u64 } else { BigInt::from(m) >> (-shift) as u64 };
        Fixed(if x < 0.0 { -mag } else { mag })
    }

    fn to_f64(&self) -> f64 {
        // Keep 64 significant bits so the integer conversion cannot overflow.
        let drop = self.0.bits().saturating_sub(64);
        let top = (&self.0 >> drop).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi(drop as i32 - FIXED_FRAC_BITS as i32)
    }

    fn from_usize(n: usize) -> Self {
        Fixed(BigInt::from(n) << FIXED_FRAC_BITS)
    }

    fn quot(&self, rhs: &Self) -> Self {
        Fixed((&self.0 << FIXED_FRAC_BITS) / &rhs.0)
    }

    fn sqrt(&self) -> Self {
        assert!(!self.0.is_negative(), "square root of a negative number");
        Fixed((&self.0 << FIXED_FRAC_BITS).sqrt())
    }

    fn epsilon() -> Self {
        Fixed(BigInt::one())
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<F> {
    nodes: Vec<F>,
    weights: Vec<F>,
}

impl<F: Real> GaussLegendre<F> {
    /// Nodes are polished by Newton's method in `F`, so the rule is accurate
    /// to the working precision of `F`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let one = F::from_f64(1.0);
        let two = F::from_f64(2.0);
        let tiny = F::epsilon() * F::from_f64(4.0);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = F::from_f64(guess);
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, &x);
                let step = p.quot(&dp);
                x = x - step.clone();
                if step.abs() <= tiny {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, &x);
            let w = two.quot(&((one.clone() - x.clone() * x.clone()) * dp.clone() * dp));
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Rule applied to `[a, b]`.
    pub fn integrate(&self, f: &impl Fn(&F) -> F, a: &F, b: &F) -> F {
        let half = (b.clone() - a.clone()) * F::from_f64(0.5);
        let mid = (a.clone() + b.clone()) * F::from_f64(0.5);
        let mut s = F::from_f64(0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + w.clone() * f(&(mid.clone() + half.clone() * x.clone()));
        }
        s * half
    }
}

/// `(P_n(x), P_n'(x))` for the Legendre polynomial.
fn legendre_with_derivative<F: Real>(n: usize, x: &F) -> (F, F) {
    let one = F::from_f64(1.0);
    if n == 0 {
        return (one, F::from_f64(0.0));
    }
    let (mut p0, mut p1) = (one.clone(), x.clone());
    for k in 2..=n {
        let kf = F::from_usize(k);
        let p2 = ((kf.clone() + kf.clone() - one.clone()) * x.clone() * p1.clone() - (kf.clone() - one.clone()) * p0)
            .quot(&kf);
        p0 = p1;
        p1 = p2;
    }
    let nf = F::from_usize(n);
    let dp = (nf * (x.clone() * p1.clone() - p0)).quot(&(x.clone() * x.clone() - one));
    (p1, dp)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
    pub converged: bool,
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub order: usize,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            order: DEFAULT_ORDER,
            max_intervals: DEFAULT_MAX_INTERVALS,
        }
    }
}

struct Piece<F> {
    a: F,
    b: F,
    value: F,
    error: f64,
}

impl<F> PartialEq for Piece<F> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<F> Eq for Piece<F> {}
impl<F> PartialOrd for Piece<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F> Ord for Piece<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, bisecting the interval with the largest error
/// estimate until the total estimate is below `max(abs_tol, rel_tol |I|)`.
///
/// An interval's value is the sum of the rule on its two halves; its error
/// estimate is the difference from the rule on the whole interval.
pub fn integrate_in<F: Real>(f: impl Fn(&F) -> F, a: F, b: F, opts: &QuadratureOptions) -> (F, QuadratureResult) {
    let rule = GaussLegendre::<F>::new(opts.order);
    let half = F::from_f64(0.5);
    let piece = |a: F, b: F| {
        let whole = rule.integrate(&f, &a, &b);
        let m = (a.clone() + b.clone()) * half.clone();
        let value = rule.integrate(&f, &a, &m) + rule.integrate(&f, &m, &b);
        let error = (value.clone() - whole).abs().to_f64();
        Piece { a, b, value, error }
    };
    let mut heap = BinaryHeap::new();
    heap.push(piece(a, b));
    loop {
        let total = heap.iter().fold(F::from_f64(0.0), |s, p| s + p.value.clone());
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs().to_f64());
        let converged = err <= target;
        if converged || heap.len() >= opts.max_intervals {
            let value = total.to_f64();
            return (total, QuadratureResult { value, error_estimate: err, intervals: heap.len(), converged });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = (worst.a.clone() + worst.b.clone()) * half.clone();
        if m <= worst.a || m >= worst.b {
            // Interval can no longer be split at this precision.
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(piece(worst.a, m.clone()));
        heap.push(piece(m, worst.b));
    }
}

/// `f64` convenience wrapper around [`integrate_in`].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, opts: &QuadratureOptions) -> QuadratureResult {
    integrate_in(|x: &f64| f(*x), a, b, opts).1
}
