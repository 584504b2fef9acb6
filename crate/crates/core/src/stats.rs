//! Mergeable one-pass moments for pairs of observations, and a delete-one
//! jackknife for the sample covariance.

use serde::Serialize;

/// Running means, second moments and co-moment of `(x, y)`.
///
/// Updates follow Welford; [`CoMoment::merge`] uses the pairwise combination of
/// Chan, Golub & LeVeque so partial accumulators can be built independently.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CoMoment {
    count: u64,
    mean_x: f64,
    mean_y: f64,
    m2_x: f64,
    m2_y: f64,
    c_xy: f64,
}

impl CoMoment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64, y: f64) {
        self.count += 1;
        let n = self.count as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.m2_x += dx * (x - self.mean_x);
        self.m2_y += dy * (y - self.mean_y);
        self.c_xy += dx * (y - self.mean_y);
    }

    pub fn merge(&mut self, other: &CoMoment) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let dx = other.mean_x - self.mean_x;
        let dy = other.mean_y - self.mean_y;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.m2_x += other.m2_x + dx * dx * na * nb / n;
        self.m2_y += other.m2_y + dy * dy * na * nb / n;
        self.c_xy += other.c_xy + dx * dy * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// Unbiased variance of `x`; `None` below two observations.
    pub fn var_x(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2_x / (self.count - 1) as f64)
    }

    pub fn var_y(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2_y / (self.count - 1) as f64)
    }

    /// Unbiased covariance.
    pub fn cov(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.c_xy / (self.count - 1) as f64)
    }
}

/// Delete-one jackknife standard error of the unbiased sample covariance.
///
/// `total` must be the accumulator over exactly `samples`. Each leave-one-out
/// co-moment is obtained by downdating the total,
/// `C_{-i} = C - N/(N-1) (x_i - x̄)(y_i - ȳ)`, so the whole estimate is O(N).
/// With fewer than three samples the normal-theory approximation
/// `sqrt((s_x^2 s_y^2 + s_xy^2) / (N-1))` is returned instead.
pub fn jackknife_cov_stderr(samples: &[(f64, f64)], total: &CoMoment) -> Option<f64> {
    let n = samples.len();
    debug_assert_eq!(n as u64, total.count());
    if n < 2 {
        return None;
    }
    if n < 3 {
        let (vx, vy, c) = (total.var_x()?, total.var_y()?, total.cov()?);
        return Some(((vx * vy + c * c) / (n - 1) as f64).sqrt());
    }
    let nf = n as f64;
    let scale = nf / (nf - 1.0);
    let loo = |&(x, y): &(f64, f64)| {
        let c = total.c_xy - scale * (x - total.mean_x) * (y - total.mean_y);
        c / (nf - 2.0)
    };
    let mean = samples.iter().map(loo).sum::<f64>() / nf;
    let ss: f64 = samples.iter().map(|s| (loo(s) - mean).powi(2)).sum();
    Some(((nf - 1.0) / nf * ss).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_pass(xs: &[(f64, f64)]) -> (f64, f64, f64, f64, f64) {
        let n = xs.len() as f64;
        let mx = xs.iter().map(|s| s.0).sum::<f64>() / n;
        let my = xs.iter().map(|s| s.1).sum::<f64>() / n;
        let vx = xs.iter().map(|s| (s.0 - mx).powi(2)).sum::<f64>() / (n - 1.0);
        let vy = xs.iter().map(|s| (s.1 - my).powi(2)).sum::<f64>() / (n - 1.0);
        let c = xs.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum::<f64>() / (n - 1.0);
        (mx, my, vx, vy, c)
    }

    /// Jackknife by literally recomputing the covariance N times.
    fn brute_jackknife(xs: &[(f64, f64)]) -> f64 {
        let n = xs.len();
        let thetas: Vec<f64> = (0..n)
            .map(|i| {
                let rest: Vec<_> = xs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| *s).collect();
                two_pass(&rest).4
            })
            .collect();
        let mean = thetas.iter().sum::<f64>() / n as f64;
        let ss: f64 = thetas.iter().map(|t| (t - mean).powi(2)).sum();
        ((n as f64 - 1.0) / n as f64 * ss).sqrt()
    }

    #[test]
    fn too_few_samples() {
        let mut acc = CoMoment::new();
        assert_eq!(acc.cov(), None);
        acc.push(1.0, 2.0);
        assert_eq!(acc.var_x(), None);
        assert_eq!(jackknife_cov_stderr(&[(1.0, 2.0)], &acc), None);
        acc.push(3.0, 1.0);
        assert_eq!(acc.cov(), Some(-1.0));
        assert!(jackknife_cov_stderr(&[(1.0, 2.0), (3.0, 1.0)], &acc).unwrap() > 0.0);
    }

    #[test]
    fn constant_stream_is_degenerate() {
        let xs = vec![(0.0, 4.0); 10];
        let mut acc = CoMoment::new();
        xs.iter().for_each(|&(x, y)| acc.push(x, y));
        assert_eq!(acc.cov(), Some(0.0));
        assert_eq!(acc.var_x(), Some(0.0));
        assert_eq!(jackknife_cov_stderr(&xs, &acc), Some(0.0));
    }

    proptest! {
        #[test]
        fn matches_two_pass(xs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..80),
                            split in 0usize..80) {
            let mut whole = CoMoment::new();
            xs.iter().for_each(|&(x, y)| whole.push(x, y));
            let (mx, my, vx, vy, c) = two_pass(&xs);
            let tol = |v: f64| 1e-9 * v.abs().max(1.0);
            prop_assert!((whole.mean_x() - mx).abs() < tol(mx));
            prop_assert!((whole.mean_y() - my).abs() < tol(my));
            prop_assert!((whole.var_x().unwrap() - vx).abs() < tol(vx) * 1e3);
            prop_assert!((whole.var_y().unwrap() - vy).abs() < tol(vy) * 1e3);
            prop_assert!((whole.cov().unwrap() - c).abs() < tol(vx.max(vy)) * 1e3);

            let split = split.min(xs.len());
            let mut a = CoMoment::new();
            let mut b = CoMoment::new();
            xs[..split].iter().for_each(|&(x, y)| a.push(x, y));
            xs[split..].iter().for_each(|&(x, y)| b.push(x, y));
            a.merge(&b);
            prop_assert_eq!(a.count(), whole.count());
            prop_assert!((a.cov().unwrap() - c).abs() < tol(vx.max(vy)) * 1e3);

            let jk = jackknife_cov_stderr(&xs, &whole).unwrap();
            let brute = brute_jackknife(&xs);
            prop_assert!((jk - brute).abs() < 1e-6 * brute.max(1.0), "{} vs {}", jk, brute);
        }
    }
}
