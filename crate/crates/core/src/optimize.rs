//! Maximisers for smooth low-dimensional objectives: exhaustive grid search
//! followed by coordinate ascent with golden-section line searches.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Evenly spaced points on `[start, stop)` (`endpoint = false`) or
/// `[start, stop]` (`endpoint = true`).
pub fn grid(start: f64, stop: f64, n: usize, endpoint: bool) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let div = if endpoint { n - 1 } else { n } as f64;
            (0..n)
                .map(|i| start + (stop - start) * i as f64 / div)
                .collect()
        }
    }
}

/// Index of the largest value; the lowest index wins ties and NaNs are skipped.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some(b) if *v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    /// Half-width of the line-search bracket around the current coordinate.
    pub bracket: f64,
    /// Line-search tolerance on the coordinate.
    pub x_tol: f64,
    /// Stop when a full sweep improves the objective by less than this.
    pub f_tol: f64,
    pub max_sweeps: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            bracket: 0.1,
            x_tol: 1e-9,
            f_tol: 1e-13,
            max_sweeps: 200,
        }
    }
}

/// Coordinate ascent from `x0`. A coordinate move is only accepted when it
/// does not lower the objective, so the result is never worse than `x0`.
pub fn coordinate_ascent<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &AscentOptions,
) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    for _ in 0..opts.max_sweeps {
        let start = fx;
        for i in 0..x.len() {
            let centre = x[i];
            let mut probe = x.clone();
            let (xi, fi) = golden_max(
                |t| {
                    probe[i] = t;
                    f(&probe)
                },
                centre - opts.bracket,
                centre + opts.bracket,
                opts.x_tol,
            );
            if fi >= fx {
                x[i] = xi;
                fx = fi;
            }
        }
        if fx - start < opts.f_tol {
            break;
        }
    }
    (x, fx)
}
