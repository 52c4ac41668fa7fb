//! Bracketing helpers shared by the trivial-curve and primary-point searches.

/// Sub-intervals of a uniform grid on `[lo, hi]` over which `f` changes sign.
///
/// Exact zeros on a grid node are reported as a bracket starting at that node.
pub fn sign_change_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / intervals as f64;
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=intervals {
        let x1 = if i == intervals { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0) && f1 != 0.0 {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Plain bisection on a sign-changing bracket until its width drops below `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Bisection followed by a few Newton steps, kept inside the original bracket.
pub fn bisect_newton<F, D>(f: F, df: D, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (lo, hi) = (a.min(b), a.max(b));
    let mut x = bisect(&f, a, b, tol);
    for _ in 0..4 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f(x) / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let done = (next - x).abs() < 1e-16;
        x = next;
        if done {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_every_simple_root_of_a_cubic() {
        let f = |x: f64| (x - 0.1) * (x + 0.4) * (x - 0.75);
        let b = sign_change_brackets(f, -1.0, 1.0, 1000);
        assert_eq!(b.len(), 3);
        let df = |x: f64| 3.0 * x * x - 0.9 * x - 0.265;
        let roots: Vec<f64> = b.iter().map(|&(a, c)| bisect_newton(f, df, a, c, 1e-13)).collect();
        for (r, e) in roots.iter().zip([-0.4, 0.1, 0.75]) {
            assert!((r - e).abs() < 1e-12, "{r} vs {e}");
        }
    }

    #[test]
    fn grid_node_zero_is_kept_once() {
        let b = sign_change_brackets(|x| x, -1.0, 1.0, 4);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].0, 0.0);
    }
}
