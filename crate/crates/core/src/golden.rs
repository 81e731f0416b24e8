/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`;
/// stops when the bracket is narrower than `tol`.
pub fn maximize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    (t, f(t))
}

pub fn minimize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (t, v) = maximize(|x| -f(x), a, b, tol);
    (t, -v)
}

/// Scans `n + 1` equally spaced points of `[a, b]` and refines around the
/// best one by golden section.
pub fn scan_maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, tol: f64) -> (f64, f64) {
    let h = (b - a) / n as f64;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..=n {
        let v = f(a + k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let lo = a + best_k.saturating_sub(1) as f64 * h;
    let hi = (a + (best_k + 1) as f64 * h).min(b);
    let (t, v) = maximize(&f, lo, hi, tol);
    if v >= best {
        (t, v)
    } else {
        (a + best_k as f64 * h, best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        // Near a quadratic peak f only resolves the argmax to about √ε.
        let (t, v) = maximize(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-10);
        assert!((t - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
        let (t, _) = minimize(|x| (x - 0.7).powi(2), 0.0, 1.0, 1e-10);
        assert!((t - 0.7).abs() < 1e-7);
    }

    #[test]
    fn scan_escapes_local_peaks() {
        let f = |x: f64| (12.0 * x).sin() + x;
        let (t, _) = scan_maximize(f, 0.0, 1.0, 1000, 1e-11);
        // 12 cos(12x) + 1 = 0 on the second rising branch gives the global peak.
        let exact = ((-1.0f64 / 12.0).acos() + 2.0 * std::f64::consts::PI) / 12.0;
        assert!((t - exact).abs() < 1e-8, "{t} vs {exact}");
    }
}
