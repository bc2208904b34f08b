//! Two-sided Fisher exact test on a 2x2 table.

/// Relative slack when deciding whether a table is as extreme as the
/// observed one, so ties computed in floating point are not lost.
const TIE_TOLERANCE: f64 = 1e-7;

/// Two-sided p-value for the table `[[a, b], [c, d]]`: the total probability,
/// under fixed margins, of every table no more likely than the observed one.
pub fn fisher_exact(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let r1 = a + b;
    let r2 = c + d;
    let c1 = a + c;
    let n = r1 + r2;
    if n == 0 {
        return 1.0;
    }
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    // log-weights relative to x = lo from the ratio of successive terms
    let mut logw = Vec::with_capacity((hi - lo + 1) as usize);
    let mut cur = 0.0f64;
    logw.push(cur);
    for x in lo..hi {
        let num = ((r1 - x) * (c1 - x)) as f64;
        let den = ((x + 1) * (r2 + x + 1 - c1)) as f64;
        cur += (num / den).ln();
        logw.push(cur);
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let observed = w[(a - lo) as usize];
    let tail: f64 = w.iter().filter(|&&p| p <= observed * (1.0 + TIE_TOLERANCE)).sum();
    (tail / total).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_table_is_one() {
        assert_eq!(fisher_exact(5, 5, 5, 5), 1.0);
    }

    #[test]
    fn perfect_separation() {
        assert!((fisher_exact(10, 0, 0, 10) - 2.0 / 184_756.0).abs() < 1e-15);
    }

    #[test]
    fn empty_and_degenerate_margins() {
        assert_eq!(fisher_exact(0, 0, 0, 0), 1.0);
        assert_eq!(fisher_exact(3, 0, 4, 0), 1.0);
    }

    #[test]
    fn large_counts_stay_in_range() {
        let p = fisher_exact(1130, 400, 270, 1260);
        assert!(p > 0.0 && p < 1e-100);
    }
}
