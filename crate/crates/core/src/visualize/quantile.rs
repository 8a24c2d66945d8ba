use super::VisualizeError;

/// Linear-interpolation quantile of already sorted data.
///
/// With `h = (m - 1) p + 1` (1-based), `j = floor(h)`, `gamma = h - j`:
/// `q(p) = x[j] + gamma (x[j+1] - x[j])`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    assert!(m > 0, "quantile of empty data");
    let h = (m - 1) as f64 * p;
    let j = h.floor() as usize;
    if j + 1 >= m {
        return sorted[m - 1];
    }
    let gamma = h - j as f64;
    sorted[j] + gamma * (sorted[j + 1] - sorted[j])
}

/// `q(hi) - q(lo)` under the linear-interpolation convention.
pub fn quantile_dispersion(values: &[f64], lo: f64, hi: f64) -> Result<f64, VisualizeError> {
    if values.is_empty() {
        return Err(VisualizeError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, hi) - quantile_sorted(&sorted, lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_list() {
        assert_eq!(quantile_dispersion(&[4.2; 17], 0.05, 0.95).unwrap(), 0.0);
    }

    #[test]
    fn uniform_grid() {
        let v: Vec<f64> = (0..=100).map(f64::from).collect();
        assert!((quantile_dispersion(&v, 0.05, 0.95).unwrap() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn two_values() {
        assert!((quantile_dispersion(&[10.0, 0.0], 0.05, 0.95).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn empty() {
        assert!(matches!(
            quantile_dispersion(&[], 0.05, 0.95),
            Err(VisualizeError::EmptyInput)
        ));
    }

    #[test]
    fn extremes() {
        let v = [3.0, -1.0, 7.0, 2.0];
        assert_eq!(quantile_dispersion(&v, 0.0, 1.0).unwrap(), 8.0);
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
    }

    proptest! {
        #[test]
        fn affine_equivariant(
            v in proptest::collection::vec(-100.0f64..100.0, 1..60),
            a in -5.0f64..5.0,
            b in -50.0f64..50.0,
        ) {
            let base = quantile_dispersion(&v, 0.05, 0.95).unwrap();
            let moved: Vec<f64> = v.iter().map(|x| a * x + b).collect();
            let d = quantile_dispersion(&moved, 0.05, 0.95).unwrap();
            prop_assert!((d - a.abs() * base).abs() < 1e-9 * (1.0 + base * a.abs()));
        }
    }
}
