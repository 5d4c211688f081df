//! Incremental nondominated archive.
//!
//! Invariant: after every insert the stored candidates form an antichain
//! under componentwise dominance at the archive's tolerance.

use crate::dominance::weakly_below_unchecked;
use crate::error::{Error, Result};
use crate::problem::CandidateSolution;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InsertOutcome {
    /// Candidate accepted; `removed` members it dominated were evicted.
    Inserted { removed: usize },
    RejectedDominated,
    /// Only produced when duplicate filtering is on.
    RejectedDuplicate,
}

#[derive(Debug, Clone)]
pub struct ParetoArchive {
    members: Vec<CandidateSolution>,
    /// Arrival stamps parallel to `members`; only kept in sorted mode.
    seqs: Vec<u64>,
    next_seq: u64,
    tau: f64,
    dedupe: bool,
    /// Exact biobjective archives keep `members` sorted by first objective
    /// (second strictly descending across distinct images), so one probe
    /// decides domination and evictions form a contiguous run. Other
    /// archives keep arrival order and scan linearly.
    sorted: bool,
}

impl ParetoArchive {
    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "archive tolerance must be finite and nonnegative, got {tau}"
            )));
        }
        Ok(ParetoArchive {
            members: Vec::new(),
            seqs: Vec::new(),
            next_seq: 0,
            tau,
            dedupe: false,
            sorted: false,
        })
    }

    /// Also reject candidates whose image exactly equals a member's image.
    /// Off by default: coincident images are incomparable, so both stay.
    pub fn with_dedupe(mut self, dedupe: bool) -> Self {
        self.dedupe = dedupe;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Stored members; image-sorted for exact biobjective archives, arrival
    /// order otherwise. [`Self::into_members`] restores arrival order.
    pub fn members(&self) -> &[CandidateSolution] {
        &self.members
    }

    /// Consumes the archive, returning the members in arrival order.
    pub fn into_members(self) -> Vec<CandidateSolution> {
        if !self.sorted {
            return self.members;
        }
        let mut stamped: Vec<(u64, CandidateSolution)> =
            self.seqs.into_iter().zip(self.members).collect();
        stamped.sort_by_key(|(seq, _)| *seq);
        stamped.into_iter().map(|(_, c)| c).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn insert(&mut self, candidate: CandidateSolution) -> Result<InsertOutcome> {
        if let Some(first) = self.members.first() {
            if first.fx.len() != candidate.fx.len() {
                return Err(Error::DimensionMismatch {
                    left: first.fx.len(),
                    right: candidate.fx.len(),
                });
            }
        } else {
            self.sorted = self.tau == 0.0 && candidate.fx.len() == 2;
        }
        if self.sorted {
            return Ok(self.insert_sorted(candidate));
        }
        let fx = candidate.fx.as_slice();
        if self
            .members
            .iter()
            .any(|m| weakly_below_unchecked(fx, m.fx.as_slice(), self.tau))
        {
            return Ok(InsertOutcome::RejectedDominated);
        }
        if self.dedupe && self.members.iter().any(|m| m.fx.as_slice() == fx) {
            return Ok(InsertOutcome::RejectedDuplicate);
        }
        let before = self.members.len();
        self.members
            .retain(|m| !weakly_below_unchecked(m.fx.as_slice(), fx, self.tau));
        let removed = before - self.members.len();
        self.members.push(candidate);
        Ok(InsertOutcome::Inserted { removed })
    }

    /// Exact biobjective insert against the image-sorted store. Distinct
    /// images never tie in one component only (the pair would be ordered),
    /// so the second component strictly descends and binary searches apply.
    fn insert_sorted(&mut self, candidate: CandidateSolution) -> InsertOutcome {
        let (a, b) = {
            let fx = candidate.fx.as_slice();
            (fx[0], fx[1])
        };
        // The first member at or right of `a` carries the largest second
        // component among those able to dominate the candidate.
        let i = self.members.partition_point(|m| m.fx.as_slice()[0] < a);
        if let Some(m) = self.members.get(i) {
            let mfx = m.fx.as_slice();
            if b <= mfx[1] && (mfx[0] > a || mfx[1] > b) {
                return InsertOutcome::RejectedDominated;
            }
            if self.dedupe && mfx[0] == a && mfx[1] == b {
                return InsertOutcome::RejectedDuplicate;
            }
        }
        // Members weakly below the candidate: first component at most `a`
        // (a prefix) and second at most `b` (a suffix of that prefix),
        // except exact image ties, which are incomparable and stay.
        let j = self.members.partition_point(|m| m.fx.as_slice()[0] <= a);
        let mut r = self.members[..j].partition_point(|m| m.fx.as_slice()[1] > b);
        while r < j {
            let mfx = self.members[r].fx.as_slice();
            if mfx[0] == a && mfx[1] == b {
                r += 1;
            } else {
                break;
            }
        }
        let removed = j - r;
        self.members.splice(r..j, std::iter::once(candidate));
        self.seqs.splice(r..j, std::iter::once(self.next_seq));
        self.next_seq += 1;
        InsertOutcome::Inserted { removed }
    }
}

/// One-shot antichain extraction: feeds every point through a fresh archive
/// and returns the surviving members in insertion order.
pub fn prune_to_antichain(
    points: Vec<CandidateSolution>,
    tau: f64,
) -> Result<Vec<CandidateSolution>> {
    let mut archive = ParetoArchive::new(tau)?;
    for p in points {
        archive.insert(p)?;
    }
    Ok(archive.into_members())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::{weakly_below, ObjectiveVector};
    use crate::problem::Feasibility;

    fn cand(fx: &[f64]) -> CandidateSolution {
        CandidateSolution {
            x: vec![0.0],
            fx: ObjectiveVector::new(fx.to_vec()).unwrap(),
            feasibility: Feasibility::Unevaluated,
            violation: 0.0,
        }
    }

    fn images(archive: &ParetoArchive) -> Vec<Vec<f64>> {
        archive
            .members()
            .iter()
            .map(|m| m.fx.as_slice().to_vec())
            .collect()
    }

    #[test]
    fn inserting_a_dominator_evicts_the_dominated() {
        let mut a = ParetoArchive::new(0.0).unwrap();
        assert_eq!(
            a.insert(cand(&[1.0, 2.0])).unwrap(),
            InsertOutcome::Inserted { removed: 0 }
        );
        assert_eq!(
            a.insert(cand(&[2.0, 1.0])).unwrap(),
            InsertOutcome::Inserted { removed: 0 }
        );
        assert_eq!(
            a.insert(cand(&[3.0, 3.0])).unwrap(),
            InsertOutcome::Inserted { removed: 2 }
        );
        assert_eq!(images(&a), vec![vec![3.0, 3.0]]);
        assert_eq!(
            a.insert(cand(&[2.0, 2.0])).unwrap(),
            InsertOutcome::RejectedDominated
        );
    }

    #[test]
    fn equal_images_both_stay_unless_dedupe() {
        let mut plain = ParetoArchive::new(0.0).unwrap();
        plain.insert(cand(&[1.0, 1.0])).unwrap();
        assert_eq!(
            plain.insert(cand(&[1.0, 1.0])).unwrap(),
            InsertOutcome::Inserted { removed: 0 }
        );
        assert_eq!(plain.len(), 2);

        let mut dedup = ParetoArchive::new(0.0).unwrap().with_dedupe(true);
        dedup.insert(cand(&[1.0, 1.0])).unwrap();
        assert_eq!(
            dedup.insert(cand(&[1.0, 1.0])).unwrap(),
            InsertOutcome::RejectedDuplicate
        );
        assert_eq!(dedup.len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut a = ParetoArchive::new(0.0).unwrap();
        a.insert(cand(&[1.0, 2.0])).unwrap();
        assert!(a.insert(cand(&[1.0, 2.0, 3.0])).is_err());
    }

    #[test]
    fn negative_or_nonfinite_tolerance_rejected() {
        assert!(ParetoArchive::new(-1e-9).is_err());
        assert!(ParetoArchive::new(f64::INFINITY).is_err());
    }

    /// Reference filter: keep exactly the points not weakly below any other.
    fn naive_maxima(points: &[CandidateSolution], tau: f64) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let dominated = points.iter().enumerate().any(|(j, q)| {
                i != j && weakly_below(p.fx.as_slice(), q.fx.as_slice(), tau).unwrap()
            });
            if !dominated {
                out.push(p.fx.as_slice().to_vec());
            }
        }
        out
    }

    /// The linear-scan insert, kept verbatim as a reference for the sorted
    /// fast path: same outcomes, same survivors, same arrival order.
    struct ScanArchive {
        members: Vec<CandidateSolution>,
        dedupe: bool,
    }

    impl ScanArchive {
        fn insert(&mut self, candidate: CandidateSolution) -> InsertOutcome {
            let fx = candidate.fx.as_slice();
            if self
                .members
                .iter()
                .any(|m| weakly_below_unchecked(fx, m.fx.as_slice(), 0.0))
            {
                return InsertOutcome::RejectedDominated;
            }
            if self.dedupe && self.members.iter().any(|m| m.fx.as_slice() == fx) {
                return InsertOutcome::RejectedDuplicate;
            }
            let before = self.members.len();
            self.members
                .retain(|m| !weakly_below_unchecked(m.fx.as_slice(), fx, 0.0));
            let removed = before - self.members.len();
            self.members.push(candidate);
            InsertOutcome::Inserted { removed }
        }
    }

    #[test]
    fn sorted_fast_path_replays_identically_to_the_linear_scan() {
        let mut state = 0x5851F42D4C957F2Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / ((1u64 << 31) as f64)
        };
        for round in 0..40 {
            let dedupe = round % 2 == 0;
            // Tight integer grids force duplicates, ties, and evictions.
            let span = 4.0 + (round % 9) as f64;
            let mut fast = ParetoArchive::new(0.0).unwrap().with_dedupe(dedupe);
            let mut reference = ScanArchive {
                members: Vec::new(),
                dedupe,
            };
            for step in 0..220 {
                let fx = [(next() * span).round(), (next() * span).round()];
                // Tag each candidate with its step so identical images stay
                // distinguishable in the order comparison below.
                let mut c = cand(&fx);
                c.x = vec![step as f64];
                assert_eq!(
                    fast.insert(c.clone()).unwrap(),
                    reference.insert(c),
                    "round {round}, step {step}"
                );
            }
            let arrivals: Vec<Vec<f64>> =
                fast.into_members().iter().map(|c| c.x.clone()).collect();
            let expected: Vec<Vec<f64>> =
                reference.members.iter().map(|c| c.x.clone()).collect();
            assert_eq!(arrivals, expected, "round {round}");
        }
    }

    #[test]
    fn prune_matches_naive_filter_on_seeded_batches() {
        // Deterministic LCG so the test needs no RNG plumbing.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / ((1u64 << 31) as f64)
        };
        for round in 0..30 {
            let n = 20 + (round * 13) % 180;
            let k = 2 + round % 3;
            let points: Vec<CandidateSolution> = (0..n)
                .map(|_| {
                    let fx: Vec<f64> = (0..k).map(|_| (next() * 10.0).round()).collect();
                    cand(&fx)
                })
                .collect();
            let mut expected = naive_maxima(&points, 0.0);
            let pruned = prune_to_antichain(points, 0.0).unwrap();
            let mut got: Vec<Vec<f64>> =
                pruned.iter().map(|c| c.fx.as_slice().to_vec()).collect();
            let key = |v: &Vec<f64>| {
                v.iter()
                    .map(|x| x.to_bits())
                    .collect::<Vec<u64>>()
            };
            expected.sort_by_key(key);
            got.sort_by_key(key);
            assert_eq!(got, expected, "round {round}");
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn archive_is_always_an_antichain(
                raw in proptest::collection::vec(
                    proptest::collection::vec(0i32..20, 3), 1..60),
                tau in prop_oneof![Just(0.0), Just(0.5)],
            ) {
                let points: Vec<CandidateSolution> = raw
                    .iter()
                    .map(|v| cand(&v.iter().map(|x| *x as f64).collect::<Vec<_>>()))
                    .collect();
                let kept = prune_to_antichain(points, tau).unwrap();
                for (i, p) in kept.iter().enumerate() {
                    for (j, q) in kept.iter().enumerate() {
                        if i != j {
                            prop_assert!(!weakly_below(
                                p.fx.as_slice(), q.fx.as_slice(), tau).unwrap());
                        }
                    }
                }
            }

            #[test]
            fn survivor_images_are_permutation_independent(
                raw in proptest::collection::vec(
                    proptest::collection::vec(0i32..15, 2), 1..40),
                rotation in 0usize..40,
            ) {
                let points: Vec<CandidateSolution> = raw
                    .iter()
                    .map(|v| cand(&v.iter().map(|x| *x as f64).collect::<Vec<_>>()))
                    .collect();
                let mut rotated = points.clone();
                let r = rotation % rotated.len().max(1);
                rotated.rotate_left(r);

                // Exact-duplicate images make survivor multiplicity depend on
                // order; dedupe restores a canonical survivor set.
                let run = |pts: Vec<CandidateSolution>| {
                    let mut a = ParetoArchive::new(0.0).unwrap().with_dedupe(true);
                    for p in pts {
                        a.insert(p).unwrap();
                    }
                    let mut images: Vec<Vec<u64>> = a
                        .members()
                        .iter()
                        .map(|m| m.fx.as_slice().iter().map(|x| x.to_bits()).collect())
                        .collect();
                    images.sort();
                    images
                };
                prop_assert_eq!(run(points), run(rotated));
            }
        }
    }
}
