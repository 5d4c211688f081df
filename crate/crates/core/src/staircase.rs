//! Sorted fast paths for exact biobjective dominance scans.
//!
//! Everything here assumes tolerance zero and exactly two objectives;
//! callers gate on that and fall back to the general quadratic scans
//! otherwise. Images are finite by construction ([`ObjectiveVector`]
//! enforces it), so plain comparisons are total.
//!
//! [`ObjectiveVector`]: crate::dominance::ObjectiveVector

use std::cmp::Ordering;

fn cmp_lex(u: &[f64; 2], v: &[f64; 2]) -> Ordering {
    u[0].total_cmp(&v[0]).then(u[1].total_cmp(&v[1]))
}

/// True iff no image is weakly below another at tolerance zero.
///
/// After a lexicographic sort the set is an antichain exactly when, between
/// neighbours, the first component ties only on value-equal images and the
/// second strictly drops otherwise; any ordered pair shows up between some
/// pair of neighbours.
pub(crate) fn is_antichain(images: &[[f64; 2]]) -> bool {
    let mut sorted = images.to_vec();
    sorted.sort_by(cmp_lex);
    sorted.windows(2).all(|w| {
        if w[0][0] == w[1][0] {
            w[0][1] == w[1][1]
        } else {
            w[0][1] > w[1][1]
        }
    })
}

/// An antichain's distinct images sorted by first component ascending,
/// second strictly descending, answering "is `q` weakly below some member"
/// with one binary search. Building refuses sets that are not antichains.
pub(crate) struct Staircase {
    pts: Vec<[f64; 2]>,
}

impl Staircase {
    pub(crate) fn build(images: &[[f64; 2]]) -> Option<Self> {
        let mut pts = images.to_vec();
        pts.sort_by(cmp_lex);
        pts.dedup();
        if pts
            .windows(2)
            .all(|w| w[0][0] < w[1][0] && w[0][1] > w[1][1])
        {
            Some(Staircase { pts })
        } else {
            None
        }
    }

    /// True iff `q` is weakly below some member at tolerance zero. The first
    /// member at or right of `q` carries the largest second component among
    /// those that could sit above, so one probe decides.
    pub(crate) fn dominates(&self, q: [f64; 2]) -> bool {
        let i = self.pts.partition_point(|p| p[0] < q[0]);
        match self.pts.get(i) {
            Some(p) => q[1] <= p[1] && (p[0] > q[0] || p[1] > q[1]),
            None => false,
        }
    }
}

/// Smallest squared Euclidean distance from `q` to any of `pts`, which must
/// be sorted ascending by first component (no antichain shape required).
/// Scans outward from the split point and stops a side once its
/// first-component gap alone is at least the current best, which can never
/// discard an improving pair.
pub(crate) fn nearest_distance_sq(pts: &[[f64; 2]], q: [f64; 2]) -> f64 {
    let split = pts.partition_point(|p| p[0] < q[0]);
    let mut best = f64::INFINITY;
    for p in &pts[split..] {
        let dx = p[0] - q[0];
        if dx * dx >= best {
            break;
        }
        best = best.min(dx * dx + (p[1] - q[1]) * (p[1] - q[1]));
    }
    for p in pts[..split].iter().rev() {
        let dx = p[0] - q[0];
        if dx * dx >= best {
            break;
        }
        best = best.min(dx * dx + (p[1] - q[1]) * (p[1] - q[1]));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::weakly_below_unchecked;

    /// Deterministic LCG; same recipe as the archive tests.
    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 33) as f64) / ((1u64 << 31) as f64)
    }

    fn naive_antichain(images: &[[f64; 2]]) -> bool {
        images.iter().enumerate().all(|(i, u)| {
            images
                .iter()
                .enumerate()
                .all(|(j, v)| i == j || !weakly_below_unchecked(u, v, 0.0))
        })
    }

    fn batch(state: &mut u64, n: usize, span: f64) -> Vec<[f64; 2]> {
        (0..n)
            .map(|_| {
                [
                    (lcg(state) * span).round(),
                    (lcg(state) * span).round(),
                ]
            })
            .collect()
    }

    #[test]
    fn antichain_check_matches_the_naive_scan() {
        let mut state = 0x9E3779B97F4A7C15u64;
        for round in 0..200 {
            // Small spans force duplicates and ordered pairs.
            let n = round % 40;
            let span = 3.0 + (round % 11) as f64;
            let images = batch(&mut state, n, span);
            assert_eq!(
                is_antichain(&images),
                naive_antichain(&images),
                "round {round}: {images:?}"
            );
        }
    }

    #[test]
    fn antichain_check_handles_signed_zero_and_duplicates() {
        assert!(is_antichain(&[]));
        assert!(is_antichain(&[[1.0, 2.0]]));
        assert!(is_antichain(&[[1.0, 2.0], [1.0, 2.0]]));
        assert!(is_antichain(&[[-0.0, 2.0], [0.0, 2.0]]));
        assert!(!is_antichain(&[[-0.0, 1.0], [0.0, 2.0]]));
        assert!(!is_antichain(&[[1.0, 2.0], [1.0, 3.0]]));
        assert!(!is_antichain(&[[1.0, 2.0], [2.0, 2.0]]));
    }

    #[test]
    fn build_accepts_exactly_the_antichains() {
        let mut state = 0x2545F4914F6CDD1Du64;
        for round in 0..200 {
            let images = batch(&mut state, round % 30, 6.0);
            assert_eq!(
                Staircase::build(&images).is_some(),
                naive_antichain(&images),
                "round {round}"
            );
        }
    }

    #[test]
    fn dominates_matches_the_naive_scan() {
        let mut state = 0xD1B54A32D192ED03u64;
        for round in 0..100 {
            let raw = batch(&mut state, 1 + round % 50, 12.0);
            // Keep the maxima so the batch is an antichain.
            let images: Vec<[f64; 2]> = raw
                .iter()
                .filter(|u| !raw.iter().any(|v| weakly_below_unchecked(*u, v, 0.0)))
                .copied()
                .collect();
            let stair = Staircase::build(&images).expect("maxima form an antichain");
            for q in batch(&mut state, 40, 14.0) {
                let naive = images
                    .iter()
                    .any(|p| weakly_below_unchecked(&q, p, 0.0));
                assert_eq!(stair.dominates(q), naive, "round {round}, query {q:?}");
            }
        }
    }

    #[test]
    fn nearest_distance_matches_the_full_scan_bit_for_bit() {
        let mut state = 0x853C49E6748FEA9Bu64;
        for round in 0..100 {
            let mut pts = batch(&mut state, 1 + round % 60, 9.0);
            pts.sort_by(cmp_lex);
            for q in batch(&mut state, 20, 11.0) {
                let naive = pts
                    .iter()
                    .map(|p| {
                        let dx = p[0] - q[0];
                        let dy = p[1] - q[1];
                        dx * dx + dy * dy
                    })
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(
                    nearest_distance_sq(&pts, q).to_bits(),
                    naive.to_bits(),
                    "round {round}, query {q:?}"
                );
            }
        }
    }

    #[test]
    fn nearest_distance_on_empty_is_infinite() {
        assert_eq!(nearest_distance_sq(&[], [0.0, 0.0]), f64::INFINITY);
    }
}
