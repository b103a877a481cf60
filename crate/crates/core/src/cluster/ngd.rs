use crate::corpus::HitCountSnapshot;
use crate::error::{Error, Result};

/// Source of occurrence counts for terms and term pairs.
pub trait HitCountProvider: Sync {
    fn count(&self, x: &str) -> u64;
    fn pair_count(&self, x: &str, y: &str) -> u64;
    fn total(&self) -> u64;
}

impl HitCountProvider for HitCountSnapshot {
    fn count(&self, x: &str) -> u64 {
        self.unigram_count(x)
    }

    fn pair_count(&self, x: &str, y: &str) -> u64 {
        HitCountSnapshot::pair_count(self, x, y)
    }

    fn total(&self) -> u64 {
        self.n
    }
}

/// Normalized Google Distance clamped to [0, 1].
///
/// Terms found in every counted unit (so that `ln N = ln f`) are at
/// distance 0 when they always co-occur and 1 otherwise.
pub fn ngd_distance(x: &str, y: &str, provider: &dyn HitCountProvider) -> Result<f64> {
    let fx = provider.count(x);
    let fy = provider.count(y);
    let n = provider.total();
    let fxy = if x == y { fx } else { provider.pair_count(x, y) };
    let bad = |reason: String| Error::Provider {
        x: x.to_string(),
        y: y.to_string(),
        reason,
    };
    if fx.max(fy) > n {
        return Err(bad(format!("N={n} is below max(f(x)={fx}, f(y)={fy})")));
    }
    if fxy > fx.min(fy) {
        return Err(bad(format!("f(x,y)={fxy} exceeds min(f(x)={fx}, f(y)={fy})")));
    }
    if x == y && fx > 0 {
        return Ok(0.0);
    }
    if fx == 0 || fy == 0 || fxy == 0 {
        return Ok(1.0);
    }
    let (lx, ly, lxy, ln) = ((fx as f64).ln(), (fy as f64).ln(), (fxy as f64).ln(), (n as f64).ln());
    let num = lx.max(ly) - lxy;
    let den = ln - lx.min(ly);
    if den <= 0.0 {
        return Ok(if num <= 0.0 { 0.0 } else { 1.0 });
    }
    Ok((num / den).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn snap(n: u64, uni: &[(&str, u64)], pairs: &[(&str, u64)]) -> HitCountSnapshot {
        HitCountSnapshot {
            n,
            unigram: uni.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
            pair: pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        }
    }

    #[test]
    fn reference_values() {
        let s = snap(1000, &[("x", 100), ("y", 100)], &[("x||y", 50)]);
        assert_eq!(ngd_distance("x", "x", &s).unwrap(), 0.0);
        let expected = (100f64.ln() - 50f64.ln()) / (1000f64.ln() - 100f64.ln());
        let got = ngd_distance("x", "y", &s).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - std::f64::consts::LOG10_2).abs() < 1e-12);
        let s = snap(1000, &[("x", 100), ("y", 100)], &[]);
        assert_eq!(ngd_distance("x", "y", &s).unwrap(), 1.0);
        assert_eq!(ngd_distance("x", "missing", &s).unwrap(), 1.0);
    }

    #[test]
    fn inconsistent_providers_rejected() {
        let s = snap(10, &[("x", 100), ("y", 1)], &[]);
        assert!(matches!(ngd_distance("x", "y", &s), Err(Error::Provider { .. })));
        let s = snap(100, &[("x", 3), ("y", 5)], &[("x||y", 4)]);
        assert!(ngd_distance("x", "y", &s).is_err());
    }

    #[test]
    fn terms_present_everywhere() {
        let s = snap(4, &[("x", 4), ("y", 4)], &[("x||y", 4)]);
        assert_eq!(ngd_distance("x", "y", &s).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(n in 1u64..1000, fx in 0u64..1000, fy in 0u64..1000, share in 0.0f64..=1.0) {
            let fx = fx.min(n);
            let fy = fy.min(n);
            let fxy = (fx.min(fy) as f64 * share).floor() as u64;
            let s = snap(n, &[("x", fx), ("y", fy)], &[("x||y", fxy)]);
            let a = ngd_distance("x", "y", &s).unwrap();
            let b = ngd_distance("y", "x", &s).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
