//! Shared numeric primitives: Dunning log-likelihood ratio, cosine
//! similarity over sparse maps, Levenshtein distance, great-circle distance.

use std::collections::BTreeMap;

/// Dunning's G² log-likelihood ratio for the 2×2 contingency table
///
/// ```text
///              occurrences   other tokens
///   sample 1       k1          n1 - k1
///   sample 2       k2          n2 - k2
/// ```
///
/// Computed cell-by-cell as `2 * Σ O·ln(O/E)` with `0·ln 0 = 0`.
pub fn log_likelihood_ratio(k1: u64, n1: u64, k2: u64, n2: u64) -> f64 {
    debug_assert!(k1 <= n1 && k2 <= n2);
    let cells = [
        k1 as f64,
        (n1 - k1) as f64,
        k2 as f64,
        (n2 - k2) as f64,
    ];
    let rows = [n1 as f64, n2 as f64];
    let cols = [(k1 + k2) as f64, ((n1 - k1) + (n2 - k2)) as f64];
    let total = (n1 + n2) as f64;
    if total == 0.0 {
        return 0.0;
    }

    let mut g2 = 0.0;
    for (i, &observed) in cells.iter().enumerate() {
        if observed == 0.0 {
            continue;
        }
        let expected = rows[i / 2] * cols[i % 2] / total;
        g2 += observed * (observed / expected).ln();
    }
    2.0 * g2
}

/// One-sided variant used for keyword weighting: 0 unless the token is
/// overrepresented in sample 1 relative to sample 2.
pub fn llr_keyword_weight(k1: u64, n1: u64, k2: u64, n2: u64) -> f64 {
    if n1 == 0 || n2 == 0 {
        return 0.0;
    }
    let rate1 = k1 as f64 / n1 as f64;
    let rate2 = k2 as f64 / n2 as f64;
    if rate1 <= rate2 {
        return 0.0;
    }
    log_likelihood_ratio(k1, n1, k2, n2)
}

/// Cosine similarity of two sparse non-negative vectors; 0.0 if either is
/// empty or has zero norm.
pub fn cosine<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut dot = 0.0;
    // Iterate the smaller map.
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for (key, &w) in small {
        if let Some(&v) = large.get(key) {
            dot += w * v;
        }
    }
    if dot == 0.0 {
        return 0.0;
    }
    let norm_a: f64 = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let norm_b: f64 = b.values().map(|w| w * w).sum::<f64>().sqrt();
    if norm_a == 0.0 || norm_b == 0.0 {
        0.0
    } else {
        dot / (norm_a * norm_b)
    }
}

/// Levenshtein edit distance over Unicode scalar values (two-row DP).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = if ca == cb { 0 } else { 1 };
            cur[j + 1] = (prev[j] + sub).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - levenshtein/max_len`, in [0, 1]. Two empty strings are identical.
pub fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in kilometres (haversine).
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}
