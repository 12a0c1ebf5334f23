const BLOCK: usize = 8;

/// Sum in index order with a fixed pairwise tree; blocks of up to eight terms
/// are accumulated left to right.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    pairwise_sum_by(terms.len(), |i| terms[i])
}

/// [`pairwise_sum`] over `term(0), …, term(len - 1)` without materializing the terms.
pub fn pairwise_sum_by(len: usize, term: impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, term: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= BLOCK {
            (lo..hi).fold(0.0, |acc, i| acc + term(i))
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, term) + go(mid, hi, term)
        }
    }
    go(0, len, &term)
}
