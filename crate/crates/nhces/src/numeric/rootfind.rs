/// A sign-changing interval for an increasing function.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct RootResult {
    pub x: f64,
    pub f: f64,
    pub iterations: u32,
}

/// Walks outward from `start` with doubling steps until an increasing
/// function changes sign. Returns `None` when no sign change appears within
/// `max_expansions` steps or the walk leaves the finite range.
pub fn bracket_monotone<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    initial_step: f64,
    max_expansions: u32,
) -> Option<Bracket> {
    assert!(initial_step > 0.0);
    let f0 = f(start);
    if !f0.is_finite() {
        return None;
    }
    if f0 == 0.0 {
        return Some(Bracket { lo: start, hi: start, f_lo: 0.0, f_hi: 0.0 });
    }
    // Increasing function: negative value means the root lies to the right.
    let dir = if f0 < 0.0 { 1.0 } else { -1.0 };
    let mut step = initial_step;
    let mut x_prev = start;
    let mut f_prev = f0;
    for _ in 0..max_expansions {
        let x = x_prev + dir * step;
        if !x.is_finite() {
            return None;
        }
        let fx = f(x);
        if !fx.is_finite() {
            return None;
        }
        if fx == 0.0 {
            return Some(Bracket { lo: x, hi: x, f_lo: 0.0, f_hi: 0.0 });
        }
        if fx.signum() != f_prev.signum() {
            let (lo, hi, f_lo, f_hi) = if dir > 0.0 {
                (x_prev, x, f_prev, fx)
            } else {
                (x, x_prev, fx, f_prev)
            };
            return Some(Bracket { lo, hi, f_lo, f_hi });
        }
        x_prev = x;
        f_prev = fx;
        step *= 2.0;
    }
    None
}

/// Newton iteration safeguarded by the bracket: any step that leaves the
/// current bracket, or a non-finite step, falls back to bisection. The closure
/// returns (f, f') at the query point. Converges when |f| <= f_tol.
pub fn newton_bisect<FD: FnMut(f64) -> (f64, f64)>(
    mut fd: FD,
    bracket: Bracket,
    f_tol: f64,
    max_iter: u32,
) -> Result<RootResult, String> {
    let Bracket { mut lo, mut hi, f_lo, f_hi } = bracket;
    if f_lo == 0.0 {
        return Ok(RootResult { x: lo, f: 0.0, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(RootResult { x: hi, f: 0.0, iterations: 0 });
    }
    assert!(f_lo < 0.0 && f_hi > 0.0, "bracket must straddle the root");
    let mut x = 0.5 * (lo + hi);
    for it in 0..max_iter {
        let (fx, dfx) = fd(x);
        if fx.abs() <= f_tol {
            return Ok(RootResult { x, f: fx, iterations: it });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (x.abs() + f64::MIN_POSITIVE) {
            let (fx, _) = fd(x);
            if fx.abs() <= f_tol {
                return Ok(RootResult { x, f: fx, iterations: it });
            }
            return Err(format!(
                "bracket collapsed at x={x:e} with residual {fx:e} above tolerance {f_tol:e}"
            ));
        }
    }
    Err(format!("no convergence within {max_iter} iterations on [{lo:e}, {hi:e}]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root_of_two() {
        let f = |x: f64| x * x * x - 2.0;
        let b = bracket_monotone(f, 0.0, 0.5, 60).unwrap();
        let r = newton_bisect(|x| (x * x * x - 2.0, 3.0 * x * x), b, 1e-14, 100).unwrap();
        assert!((r.x - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn walks_left_when_start_is_past_the_root() {
        let f = |x: f64| x - 3.0;
        let b = bracket_monotone(f, 10.0, 1.0, 60).unwrap();
        assert!(b.lo <= 3.0 && 3.0 <= b.hi);
    }

    #[test]
    fn reports_no_bracket_for_positive_function() {
        // Bounded away from zero on both sides, unlike exp, which
        // underflows to an exact zero far to the left.
        assert!(bracket_monotone(|x: f64| 2.0 + x.tanh(), 0.0, 1.0, 20).is_none());
    }

    #[test]
    fn survives_bad_derivative_via_bisection() {
        let b = bracket_monotone(|x: f64| x - 1.0, 0.0, 0.5, 60).unwrap();
        let r = newton_bisect(|x| (x - 1.0, 0.0), b, 1e-14, 200).unwrap();
        assert!((r.x - 1.0).abs() < 1e-12);
    }
}
