//! Bracketing helpers shared by the interval solvers.

use super::ROOT_RESIDUAL_TOL;
use crate::error::{Error, Result};

/// Bisects `f` on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
///
/// Runs until the bracket stops shrinking in floating point or its width
/// drops below `xtol`. Returns the midpoint of the final bracket together
/// with its width.
pub(crate) fn bisect<F>(operation: &'static str, mut f: F, a: f64, b: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (a, b);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver {
            operation,
            reason: format!("no sign change on [{a}, {b}]"),
            residual: f64::NAN,
        });
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || (hi - lo).abs() <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), (hi - lo).abs()))
}

/// The neighbouring float of `x` in direction `dir`.
pub(crate) fn next_float(x: f64, dir: f64) -> f64 {
    if dir > 0.0 {
        x.next_up()
    } else {
        x.next_down()
    }
}

/// Finds a bracket on one side of `edge` for a function whose sign just
/// past `edge` differs from its sign far away.
///
/// Candidate points are `edge + dir * d`. The inner offset starts at
/// `inner` and shrinks by 10x until `f` takes `near_sign`; the outer offset
/// grows by 25% from `outer` until the sign flips or it exceeds `limit`, so
/// the bracket encloses the sign change closest to `edge`.
///
/// When the sign change cannot be separated from `edge` in floating point,
/// the degenerate bracket `(x, x)` with `x` the float next to `edge` is
/// returned.
pub(crate) fn bracket_from_edge<F>(
    operation: &'static str,
    f: &mut F,
    edge: f64,
    dir: f64,
    inner: f64,
    outer: f64,
    limit: f64,
    near_sign: f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut d_in = inner;
    let floor = edge.abs().max(1e-300) * 4.0 * f64::EPSILON;
    while f(edge + dir * d_in).signum() != near_sign {
        d_in *= 0.1;
        if d_in < floor {
            // the sign change lies within a few ulps of the edge
            let x = next_float(edge, dir);
            return Ok((x, x));
        }
    }
    let mut d_out = outer.max(2.0 * d_in);
    loop {
        let v = f(edge + dir * d_out);
        if v.signum() == -near_sign {
            return Ok((edge + dir * d_in, edge + dir * d_out));
        }
        d_out *= 1.25;
        if d_out > limit {
            return Err(Error::Solver {
                operation,
                reason: format!("no bracket within {limit} of {edge}"),
                residual: f64::NAN,
            });
        }
    }
}

/// Root on one side of `edge`: [`bracket_from_edge`] followed by
/// [`bisect`]. Returns the root and the final bracket width.
#[allow(clippy::too_many_arguments)]
pub(crate) fn root_from_edge<F>(
    operation: &'static str,
    f: &mut F,
    edge: f64,
    dir: f64,
    inner: f64,
    outer: f64,
    limit: f64,
    near_sign: f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let (a, b) = bracket_from_edge(operation, f, edge, dir, inner, outer, limit, near_sign)?;
    if a == b {
        return Ok((a, (a - edge).abs()));
    }
    bisect(operation, f, a, b, 0.0)
}

/// Accepted residual of `g` at a root `t`: [`ROOT_RESIDUAL_TOL`] or, when
/// `g` is too steep for that, four times its change over one ulp of `t`.
pub(crate) fn residual_tolerance(g: impl Fn(f64) -> f64, t: f64) -> f64 {
    let here = g(t);
    let step = (g(t.next_up()) - here).abs().max((g(t.next_down()) - here).abs());
    if step.is_finite() {
        ROOT_RESIDUAL_TOL.max(4.0 * step)
    } else {
        ROOT_RESIDUAL_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let (x, w) = bisect("t", |x| x * x - 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 4e-16);
        assert!(w < 1e-15);
        assert!(bisect("t", |x| x * x + 1.0, 0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn bracket_expands() {
        let mut f = |x: f64| 1000.0 - x;
        let (a, b) = bracket_from_edge("t", &mut f, 1.0, 1.0, 1e-6, 1.0, 1e6, 1.0).unwrap();
        assert!(f(a) > 0.0 && f(b) < 0.0);
        let mut g = |x: f64| 1000.0 - x;
        assert!(bracket_from_edge("t", &mut g, 1.0, 1.0, 1e-6, 1.0, 100.0, 1.0).is_err());
    }

    #[test]
    fn root_at_the_edge() {
        // positive only on (1, 1 + 1e-20), which holds no float
        let mut f = |x: f64| if x > 1.0 + 1e-20 || x <= 1.0 { -1.0 } else { 1.0 };
        let (x, w) = root_from_edge("t", &mut f, 1.0, 1.0, 1e-6, 1.0, 1e6, 1.0).unwrap();
        assert_eq!(x, 1f64.next_up());
        assert_eq!(w, f64::EPSILON);
    }

    #[test]
    fn steep_functions_get_wider_tolerance() {
        assert_eq!(residual_tolerance(|x| x - 1.0, 1.0), ROOT_RESIDUAL_TOL);
        let tol = residual_tolerance(|x| 1e10 * (x - 1.0), 1.0);
        assert!(tol > 1e-6 && tol < 1e-5);
    }
}
