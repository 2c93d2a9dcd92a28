//! Locating the first zero of a nonnegative function on `(0, t_max]`.
//!
//! The functions searched here (fidelity along an orbit, distance of an evolved
//! operator from a target) touch zero without changing sign, so sign-change
//! bisection does not apply. A coarse uniform scan brackets each sampled local
//! minimum in order, and golden-section search shrinks the bracket until it is
//! below [`REL_TOL`] relative width. The first refined minimum whose value is
//! at or below the acceptance level is returned.

/// Relative bracket width at which refinement stops.
pub const REL_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 200;

/// Golden-section minimisation of `f` on `[a, b]`; returns `(argmin, min)`.
pub fn golden_minimize(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_ITER {
        // stop well below REL_TOL so the bracket midpoint is accurate to it
        if (b - a).abs() <= 1e-3 * REL_TOL * b.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm <= fx {
        (mid, fm)
    } else {
        (x, fx)
    }
}

/// First `t` in `(0, t_max]` where `f` reaches a local minimum with `f(t) <= accept`.
pub fn first_touchdown(f: impl Fn(f64) -> f64, t_max: f64, samples: usize, accept: f64) -> Option<f64> {
    let samples = samples.max(2);
    let step = t_max / samples as f64;
    let values: Vec<f64> = (0..=samples).map(|i| f(i as f64 * step)).collect();
    for i in 1..=samples {
        let left = values[i - 1];
        let here = values[i];
        let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let is_min = here <= left && here <= right && (here < left || here < right);
        if !is_min {
            continue;
        }
        let lo = (i - 1) as f64 * step;
        let hi = if i == samples { t_max } else { (i + 1) as f64 * step };
        let (t, ft) = golden_minimize(&f, lo, hi);
        if ft <= accept {
            return Some(t);
        }
    }
    None
}
