//! Double description: extreme rays of a pointed polyhedral cone given by
//! homogeneous inequalities `row · x ≥ 0`.
//!
//! The incremental step keeps the generator set irredundant via the
//! combinatorial adjacency test (two rays are adjacent iff no third ray is
//! tight on every inequality both are tight on). Requires a pointed cone:
//! the inequality rows must have full column rank.

use crate::rat::{dot_ii, primitive, IVec, QVec, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

const MAX_ROWS: usize = 128;

/// Extreme rays, as primitive integer vectors sorted lexicographically.
/// Returns an empty list for the trivial cone `{0}`.
pub fn extreme_rays(rows: &[IVec], dim: usize) -> Vec<IVec> {
    assert!(
        rows.len() <= MAX_ROWS,
        "double description supports at most {MAX_ROWS} inequalities, got {}",
        rows.len()
    );
    assert!(rows.iter().all(|r| r.len() == dim));

    // Initial simplicial cone from `dim` independent rows.
    let rat_rows: Vec<QVec> = rows
        .iter()
        .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
        .collect();
    let mut basis: Vec<usize> = Vec::new();
    let mut picked: Vec<QVec> = Vec::new();
    for (i, row) in rat_rows.iter().enumerate() {
        picked.push(row.clone());
        if super::linalg::rank(&picked) == picked.len() {
            basis.push(i);
        } else {
            picked.pop();
        }
        if basis.len() == dim {
            break;
        }
    }
    assert!(
        basis.len() == dim,
        "cone is not pointed: inequality rows span rank {} < {dim}",
        basis.len()
    );

    let inv = super::linalg::invert(&picked).expect("independent rows must be invertible");
    // Column j of the inverse satisfies row_i · c_j = δ_ij ≥ 0.
    let mut rays: Vec<IVec> = inv
        .iter()
        .map(|col| crate::rat::clear_denominators(col))
        .collect();
    let mut masks: Vec<u128> = (0..dim)
        .map(|j| {
            let mut m = 0u128;
            for (bi, &row_idx) in basis.iter().enumerate() {
                if bi != j {
                    m |= 1 << row_idx;
                }
            }
            m
        })
        .collect();

    let mut processed: u128 = basis.iter().fold(0u128, |m, &i| m | (1 << i));
    for (t, row) in rows.iter().enumerate() {
        if basis.contains(&t) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot_ii(row, r)).collect();
        let any_neg = vals.iter().any(|v| v.is_negative());
        processed |= 1 << t;
        if !any_neg {
            for (m, v) in masks.iter_mut().zip(&vals) {
                if v.is_zero() {
                    *m |= 1 << t;
                }
            }
            continue;
        }

        let mut new_rays: Vec<IVec> = Vec::new();
        for p in 0..rays.len() {
            if !vals[p].is_positive() {
                continue;
            }
            for q in 0..rays.len() {
                if !vals[q].is_negative() {
                    continue;
                }
                let common = masks[p] & masks[q];
                let adjacent = (0..rays.len())
                    .all(|x| x == p || x == q || (masks[x] & common) != common);
                if !adjacent {
                    continue;
                }
                let w: IVec = rays[p]
                    .iter()
                    .zip(&rays[q])
                    .map(|(rp, rq)| &vals[p] * rq - &vals[q] * rp)
                    .collect();
                let w = primitive(&w);
                if !new_rays.contains(&w) {
                    new_rays.push(w);
                }
            }
        }

        let mut kept_rays = Vec::new();
        let mut kept_masks = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            let mut m = masks[i];
            if vals[i].is_zero() {
                m |= 1 << t;
            }
            kept_rays.push(r.clone());
            kept_masks.push(m);
        }
        for w in new_rays {
            // Recompute tightness honestly: degenerate inputs can make a
            // combination tight on rows beyond the defining pair.
            let mut m = 0u128;
            for (i, row2) in rows.iter().enumerate() {
                if processed & (1 << i) != 0 && dot_ii(row2, &w).is_zero() {
                    m |= 1 << i;
                }
            }
            kept_rays.push(w);
            kept_masks.push(m);
        }
        rays = kept_rays;
        masks = kept_masks;
        if rays.is_empty() {
            return Vec::new();
        }
    }

    rays.sort();
    rays.dedup();
    rays
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ivec;

    #[test]
    fn positive_orthant() {
        // {x : x_j >= 0} has extreme rays e_1, e_2, e_3.
        let rows = vec![ivec(&[1, 0, 0]), ivec(&[0, 1, 0]), ivec(&[0, 0, 1])];
        let rays = extreme_rays(&rows, 3);
        assert_eq!(
            rays,
            vec![ivec(&[0, 0, 1]), ivec(&[0, 1, 0]), ivec(&[1, 0, 0])]
        );
    }

    #[test]
    fn sliced_orthant() {
        // {x, y >= 0, y - x >= 0} = cone((0,1),(1,1)).
        let rows = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, 1])];
        let rays = extreme_rays(&rows, 2);
        assert_eq!(rays, vec![ivec(&[0, 1]), ivec(&[1, 1])]);
    }

    #[test]
    fn trivial_cone() {
        // x >= 0, -x >= 0, y >= 0, -y >= 0  =>  {0}.
        let rows = vec![
            ivec(&[1, 0]),
            ivec(&[-1, 0]),
            ivec(&[0, 1]),
            ivec(&[0, -1]),
        ];
        assert!(extreme_rays(&rows, 2).is_empty());
    }

    #[test]
    fn degenerate_square_dual() {
        // Dual cone at the apex of a square pyramid: four inequalities in
        // R^3 whose rays are the four edge directions (a degenerate vertex
        // exercising the adjacency recomputation).
        let rows = vec![
            ivec(&[1, 0, 1]),
            ivec(&[-1, 0, 1]),
            ivec(&[0, 1, 1]),
            ivec(&[0, -1, 1]),
        ];
        let rays = extreme_rays(&rows, 3);
        assert_eq!(rays.len(), 4);
        for r in &rays {
            assert_eq!(r[2], 1.into());
            assert_eq!(r[0].abs(), 1.into());
            assert_eq!(r[1].abs(), 1.into());
        }
    }
}
