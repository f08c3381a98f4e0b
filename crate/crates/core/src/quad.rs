//! Small quadrature helpers: adaptive Simpson and fixed Gauss–Legendre
//! panels.  Integrands in this workspace are piecewise smooth (products of
//! `cosh`/`sinh`/linear factors), so these two rules cover every need.

use crate::Real;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`.  Handles `a > b` by sign reversal.
pub fn adaptive_simpson<F: Real>(f: impl Fn(F) -> F, a: F, b: F, tol: F) -> F {
    if a == b {
        return F::zero();
    }
    if a > b {
        return -adaptive_simpson(f, b, a, tol);
    }
    let half = F::of(0.5);
    let c = (a + b) * half;
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = simpson(a, b, fa, fc, fb);
    simpson_rec(&f, a, b, c, fa, fb, fc, whole, tol, 24)
}

#[inline]
fn simpson<F: Real>(a: F, b: F, fa: F, fc: F, fb: F) -> F {
    (b - a) / F::of(6.0) * (fa + F::of(4.0) * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Real>(
    f: &impl Fn(F) -> F,
    a: F,
    b: F,
    c: F,
    fa: F,
    fb: F,
    fc: F,
    whole: F,
    tol: F,
    depth: u32,
) -> F {
    let half = F::of(0.5);
    let d = (a + c) * half;
    let e = (c + b) * half;
    let fd = f(d);
    let fe = f(e);
    let left = simpson(a, c, fa, fd, fc);
    let right = simpson(c, b, fc, fe, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= F::of(15.0) * tol {
        left + right + err / F::of(15.0)
    } else {
        let ht = tol * half;
        simpson_rec(f, a, c, d, fa, fc, fd, left, ht, depth - 1)
            + simpson_rec(f, c, b, e, fc, fb, fe, right, ht, depth - 1)
    }
}

/// 16-point Gauss–Legendre nodes on (0, 1), positive half only; the rule is
/// symmetric about 1/2.
const GL16_NODES: [f64; 8] = [
    0.5 + 0.5 * 0.095_012_509_837_637_440_185,
    0.5 + 0.5 * 0.281_603_550_779_258_913_230,
    0.5 + 0.5 * 0.458_016_777_657_227_386_342,
    0.5 + 0.5 * 0.617_876_244_402_643_748_447,
    0.5 + 0.5 * 0.755_404_408_355_003_033_895,
    0.5 + 0.5 * 0.865_631_202_387_831_743_880,
    0.5 + 0.5 * 0.944_575_023_073_232_576_078,
    0.5 + 0.5 * 0.989_400_934_991_649_932_596,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.5 * 0.189_450_610_455_068_496_285,
    0.5 * 0.182_603_415_044_923_588_867,
    0.5 * 0.169_156_519_395_002_538_189,
    0.5 * 0.149_595_988_816_576_732_081,
    0.5 * 0.124_628_971_255_533_872_052,
    0.5 * 0.095_158_511_682_492_784_810,
    0.5 * 0.062_253_523_938_647_892_863,
    0.5 * 0.027_152_459_411_754_094_852,
];

/// 16-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre_16<F: Real>(f: impl Fn(F) -> F, a: F, b: F) -> F {
    let len = b - a;
    let mut s = F::zero();
    for i in 0..8 {
        let t_hi = F::of(GL16_NODES[i]);
        let t_lo = F::one() - t_hi;
        let wgt = F::of(GL16_WEIGHTS[i]);
        s = s + wgt * (f(a + len * t_hi) + f(a + len * t_lo));
    }
    s * len
}

/// The nodes and weights of the 16-point Gauss–Legendre rule on `[a, b]`,
/// for callers that build product rules (weights sum to `b − a`).
pub fn gauss_legendre_16_table<F: Real>(a: F, b: F) -> [(F, F); 16] {
    let len = b - a;
    let mut out = [(F::zero(), F::zero()); 16];
    for i in 0..8 {
        let t_hi = F::of(GL16_NODES[i]);
        let t_lo = F::one() - t_hi;
        let wgt = F::of(GL16_WEIGHTS[i]) * len;
        out[2 * i] = (a + len * t_lo, wgt);
        out[2 * i + 1] = (a + len * t_hi, wgt);
    }
    out
}

/// Composite 16-point Gauss–Legendre rule with `panels` equal panels.
pub fn gauss_legendre_panels<F: Real>(f: impl Fn(F) -> F, a: F, b: F, panels: usize) -> F {
    let n = F::of(panels as f64);
    let len = (b - a) / n;
    let mut s = F::zero();
    for k in 0..panels {
        let lo = a + len * F::of(k as f64);
        s = s + gauss_legendre_16(&f, lo, lo + len);
    }
    s
}
