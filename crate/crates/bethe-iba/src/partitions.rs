//! Integer partitions, hole sets, and the dictionary between them.
//!
//! Excited states are indexed by integer partitions ν = (ν₁ ≥ … ≥ ν_H > 0).
//! Each partition owns a set of "hole" quantum numbers — admissible integers
//! k whose would-be root x_k = z⁻¹(k + 1/2) is *not* a zero of Q. The
//! dictionary used throughout the crate:
//!
//! * holes: with ν′ the parts in ascending order, the finite holes are
//!   m_l = −H + ν′_l + (l − 1) for l = 1..H, and every k < −H is also a hole
//!   (encoded by `kappa = −H`, the smallest non-hole quantum number);
//! * σ-map: σ(k) = ν_{H+1−k} − (H + 1 − k) for k = 1..H enumerates the same
//!   finite holes in increasing order;
//! * invariants: sector = κ + H (always 0 in this crate's gauge) and
//!   level = H(H+1)/2 + Σ m_l, which equals the partition weight N.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An integer partition in non-increasing order; the empty partition is the
/// ground state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Validate and wrap parts (must be positive and non-increasing).
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(Error::Usage(format!(
                    "partition parts must be non-increasing, got {} before {}",
                    w[0], w[1]
                )));
            }
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Usage("partition parts must be positive".into()));
        }
        Ok(Partition { parts })
    }

    /// The ground state (empty partition).
    pub fn ground() -> Self {
        Partition { parts: Vec::new() }
    }

    /// Parts in non-increasing order.
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Number of parts H.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// True for the ground state.
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Weight N = Σ νᵢ.
    pub fn weight(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Parse `"3,1,1"`; the empty string is the ground state.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(Partition::ground());
        }
        let parts = trimmed
            .split(',')
            .map(|tok| {
                tok.trim().parse::<u64>().map_err(|_| {
                    Error::Usage(format!("invalid partition component {tok:?} in {text:?}"))
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        Partition::new(parts)
    }

    /// Canonical text form, inverse of [`Partition::parse`].
    pub fn to_text(&self) -> String {
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            write!(f, "()")
        } else {
            write!(f, "({})", self.to_text())
        }
    }
}

/// A hole set: the quantum numbers left vacant by an excited state.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleSet {
    /// Smallest non-hole quantum number is κ = −H: every k < κ is a hole.
    pub kappa: i64,
    /// The H finite hole quantum numbers, strictly increasing.
    pub finite_holes: Vec<i64>,
    /// Least momentum at which the state is admissible: p ≥ (N + 1/2)/2.
    pub p_floor: f64,
}

/// Map a partition to its hole set at momentum `p`.
///
/// Errors with [`Error::Admissibility`] unless 2p ≥ N + 1/2.
pub fn holes_from_partition(nu: &Partition, p: f64) -> Result<HoleSet> {
    let n = nu.weight();
    let bound = n as f64 + 0.5;
    if 2.0 * p < bound {
        return Err(Error::Admissibility {
            two_p: 2.0 * p,
            bound,
        });
    }
    let h = nu.len() as i64;
    // Ascending parts ν′_l = ν_{H+1−l}.
    let finite_holes = nu
        .parts()
        .iter()
        .rev()
        .enumerate()
        .map(|(i, &part)| -h + part as i64 + i as i64)
        .collect();
    Ok(HoleSet {
        kappa: -h,
        finite_holes,
        p_floor: bound / 2.0,
    })
}

/// Inverse dictionary: reconstruct the partition from a hole set.
///
/// Errors with [`Error::MalformedHoles`] when the finite holes are not
/// strictly increasing, are inconsistent with κ, or would produce
/// non-positive parts.
pub fn partition_from_holes(holes: &HoleSet) -> Result<Partition> {
    let h = holes.finite_holes.len() as i64;
    if holes.kappa != -h {
        return Err(Error::MalformedHoles(format!(
            "kappa = {} does not match hole count {}",
            holes.kappa, h
        )));
    }
    for w in holes.finite_holes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::MalformedHoles(format!(
                "finite holes must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&first) = holes.finite_holes.first() {
        if first < -h + 1 {
            return Err(Error::MalformedHoles(format!(
                "hole {first} below the admissible range for {h} holes"
            )));
        }
    }
    // ν′_l = m_l + H − l + 1 in ascending order, l = 1..H.
    let mut ascending = Vec::with_capacity(holes.finite_holes.len());
    for (i, &m) in holes.finite_holes.iter().enumerate() {
        let l = i as i64 + 1;
        let part = m + h - l + 1;
        if part <= 0 {
            return Err(Error::MalformedHoles(format!(
                "hole {m} at slot {l} maps to non-positive part {part}"
            )));
        }
        ascending.push(part as u64);
    }
    ascending.reverse();
    Partition::new(ascending).map_err(|e| Error::MalformedHoles(e.to_string()))
}

/// Sector and level of a hole set: (κ + H, H(H+1)/2 + Σ m_l).
///
/// For hole sets produced by [`holes_from_partition`] the sector is 0 and
/// the level equals the partition weight N.
pub fn invariants(holes: &HoleSet) -> (i64, i64) {
    let h = holes.finite_holes.len() as i64;
    let sector = holes.kappa + h;
    let level = h * (h + 1) / 2 + holes.finite_holes.iter().sum::<i64>();
    (sector, level)
}

/// The hole quantum numbers as a function of the descending index
/// k = 1..H: σ(k) = ν_{H+1−k} − (H+1−k). Returned for k = 1, 2, …, H
/// (strictly increasing; identical to the finite holes as a set).
pub fn sigma_map(nu: &Partition) -> Vec<i64> {
    let h = nu.len() as i64;
    (1..=h)
        .map(|k| {
            let idx = (h - k) as usize; // ν_{H+1−k} with 0-based parts
            nu.parts()[idx] as i64 - (h + 1 - k)
        })
        .collect()
}

/// All partitions of `n` in reverse lexicographic order (largest first part
/// first); `n = 0` yields exactly the ground state.
pub fn enumerate_partitions(n: u64) -> Vec<Partition> {
    fn rec(remaining: u64, max_part: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n.max(1), &mut Vec::new(), &mut out);
    out
}

/// Hole sets of every state at level `n`, admissible at momentum `p`.
pub fn enumerate_level(n: u64, p: f64) -> Result<Vec<HoleSet>> {
    enumerate_partitions(n)
        .iter()
        .map(|nu| holes_from_partition(nu, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent partition counts by the Euler pentagonal-number
    /// recurrence (no shared code with `enumerate_partitions`).
    fn partition_counts(n_max: usize) -> Vec<i64> {
        let mut p = vec![0i64; n_max + 1];
        p[0] = 1;
        for n in 1..=n_max {
            let mut acc = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = k * (3 * k - 1) / 2;
                let g2 = k * (3 * k + 1) / 2;
                if g1 as usize > n {
                    break;
                }
                let sign = if k % 2 == 0 { -1 } else { 1 };
                acc += sign * p[n - g1 as usize];
                if g2 as usize <= n {
                    acc += sign * p[n - g2 as usize];
                }
                k += 1;
            }
            p[n] = acc;
        }
        p
    }

    #[test]
    fn enumeration_counts_match_pentagonal_recurrence() {
        let counts = partition_counts(10);
        // Classic values as a second, hard-coded cross-check.
        assert_eq!(&counts[..11], &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        for n in 0..=10u64 {
            assert_eq!(
                enumerate_partitions(n).len() as i64,
                counts[n as usize],
                "partition count mismatch at n = {n}"
            );
        }
    }

    #[test]
    fn enumeration_is_reverse_lexicographic_and_valid() {
        let parts = enumerate_partitions(6);
        for pair in parts.windows(2) {
            assert!(pair[0].parts() > pair[1].parts());
        }
        for p in &parts {
            assert_eq!(p.weight(), 6);
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn hole_dictionary_examples() {
        // ν = (1): single hole at 0.
        let hs = holes_from_partition(&Partition::parse("1").unwrap(), 10.0).unwrap();
        assert_eq!(hs.kappa, -1);
        assert_eq!(hs.finite_holes, vec![0]);
        // ν = (2,1): holes at −1 and 1.
        let hs = holes_from_partition(&Partition::parse("2,1").unwrap(), 10.0).unwrap();
        assert_eq!(hs.kappa, -2);
        assert_eq!(hs.finite_holes, vec![-1, 1]);
        // ν = (3,1,1): holes at −2, −1, 2.
        let hs = holes_from_partition(&Partition::parse("3,1,1").unwrap(), 10.0).unwrap();
        assert_eq!(hs.kappa, -3);
        assert_eq!(hs.finite_holes, vec![-2, -1, 2]);
        // Ground state: no holes.
        let hs = holes_from_partition(&Partition::ground(), 1.0).unwrap();
        assert_eq!(hs.kappa, 0);
        assert!(hs.finite_holes.is_empty());
    }

    #[test]
    fn sigma_map_matches_finite_holes() {
        for n in 0..=8u64 {
            for nu in enumerate_partitions(n) {
                let hs = holes_from_partition(&nu, 40.0).unwrap();
                let sigma = sigma_map(&nu);
                assert_eq!(sigma, hs.finite_holes, "sigma mismatch for {nu}");
                for w in sigma.windows(2) {
                    assert!(w[0] < w[1], "sigma not strictly increasing for {nu}");
                }
            }
        }
    }

    #[test]
    fn invariants_give_sector_zero_and_level_n() {
        for n in 0..=8u64 {
            for nu in enumerate_partitions(n) {
                let hs = holes_from_partition(&nu, 40.0).unwrap();
                let (sector, level) = invariants(&hs);
                assert_eq!(sector, 0, "nonzero sector for {nu}");
                assert_eq!(level, n as i64, "level != weight for {nu}");
            }
        }
    }

    #[test]
    fn round_trips_are_exhaustive_identities() {
        for n in 0..=8u64 {
            for nu in enumerate_partitions(n) {
                let hs = holes_from_partition(&nu, 40.0).unwrap();
                let back = partition_from_holes(&hs).unwrap();
                assert_eq!(back, nu, "round trip failed for {nu}");
            }
        }
    }

    #[test]
    fn admissibility_gate() {
        // 2p ≥ N + 1/2: at p = 10 weight 19 passes, weight 20 fails.
        let ok = Partition::new(vec![19]).unwrap();
        assert!(holes_from_partition(&ok, 10.0).is_ok());
        let too_big = Partition::new(vec![20]).unwrap();
        match holes_from_partition(&too_big, 10.0) {
            Err(Error::Admissibility { two_p, bound }) => {
                assert_eq!(two_p, 20.0);
                assert_eq!(bound, 20.5);
            }
            other => panic!("expected admissibility error, got {other:?}"),
        }
        // The p_floor field matches the gate.
        let hs = holes_from_partition(&ok, 10.0).unwrap();
        assert_eq!(hs.p_floor, 19.5 / 2.0);
    }

    #[test]
    fn malformed_hole_sets_are_rejected() {
        // Non-increasing holes.
        let bad = HoleSet {
            kappa: -2,
            finite_holes: vec![1, 1],
            p_floor: 0.0,
        };
        assert!(matches!(
            partition_from_holes(&bad),
            Err(Error::MalformedHoles(_))
        ));
        // kappa inconsistent with the hole count.
        let bad = HoleSet {
            kappa: -1,
            finite_holes: vec![0, 2],
            p_floor: 0.0,
        };
        assert!(partition_from_holes(&bad).is_err());
        // Hole below the admissible window (would give part ≤ 0).
        let bad = HoleSet {
            kappa: -1,
            finite_holes: vec![-1],
            p_floor: 0.0,
        };
        assert!(partition_from_holes(&bad).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Partition::parse("3,1,1").unwrap().parts(), &[3, 1, 1]);
        assert_eq!(Partition::parse("  ").unwrap(), Partition::ground());
        assert_eq!(Partition::parse("5").unwrap().weight(), 5);
        assert!(Partition::parse("1,3").is_err());
        assert!(Partition::parse("0").is_err());
        assert!(Partition::parse("a,b").is_err());
        let nu = Partition::parse("4,2").unwrap();
        assert_eq!(nu.to_text(), "4,2");
        assert_eq!(format!("{nu}"), "(4,2)");
        assert_eq!(format!("{}", Partition::ground()), "()");
    }

    #[test]
    fn enumerate_level_respects_admissibility() {
        assert_eq!(enumerate_level(3, 10.0).unwrap().len(), 3);
        assert!(enumerate_level(25, 10.0).is_err());
        // Level 0 is exactly the ground state.
        let gs = enumerate_level(0, 1.0).unwrap();
        assert_eq!(gs.len(), 1);
        assert_eq!(gs[0].kappa, 0);
    }
}
