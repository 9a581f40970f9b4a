//! Non-crossing partitions and the free moment–cumulant relation.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::NcError;

/// Largest `k` accepted by the partition enumerators.
pub const MAX_PARTITION_SIZE: usize = 12;

/// A non-crossing partition of `{1, …, k}`. Blocks are sorted internally
/// and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block sizes in block order.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Would adding `x` (larger than every element placed so far) to
/// `blocks[target]` create a crossing?
fn crosses_if_added(blocks: &[Vec<usize>], target: usize, x: usize) -> bool {
    blocks[target].iter().any(|&b| {
        blocks
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target)
            .any(|(_, c)| c.iter().any(|&a| a < b) && c.iter().any(|&cc| b < cc && cc < x))
    })
}

fn extend(k: usize, next: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<NCPartition>) {
    if next > k {
        out.push(NCPartition { blocks: blocks.clone() });
        return;
    }
    for target in 0..blocks.len() {
        if !crosses_if_added(blocks, target, next) {
            blocks[target].push(next);
            extend(k, next + 1, blocks, out);
            blocks[target].pop();
        }
    }
    blocks.push(vec![next]);
    extend(k, next + 1, blocks, out);
    blocks.pop();
}

/// All non-crossing partitions of `{1, …, k}` for `1 ≤ k ≤ 12`.
pub fn noncrossing_partitions(k: usize) -> Result<Vec<NCPartition>, NcError> {
    if !(1..=MAX_PARTITION_SIZE).contains(&k) {
        return Err(NcError::PartitionRange { k });
    }
    let mut out = Vec::new();
    extend(k, 1, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Multiset of block sizes (sorted) → number of partitions in `NC(n)` with
/// that profile.
fn block_profiles(n: usize) -> Result<BTreeMap<Vec<usize>, u64>, NcError> {
    let mut profiles = BTreeMap::new();
    for p in noncrossing_partitions(n)? {
        let mut sizes = p.block_sizes();
        sizes.sort_unstable();
        *profiles.entry(sizes).or_insert(0) += 1;
    }
    Ok(profiles)
}

fn product_over_blocks(sizes: &[usize], kappa: &[Complex64]) -> Complex64 {
    sizes.iter().map(|&s| kappa[s - 1]).product()
}

/// Free cumulants `κ₁ … κ_k` from moments `m₁ … m_k`, solving
/// `m_n = Σ_{π ∈ NC(n)} Π_{B ∈ π} κ_{|B|}` for `κ_n` one order at a time.
pub fn free_cumulants(moments: &[Complex64]) -> Result<Vec<Complex64>, NcError> {
    if moments.len() > MAX_PARTITION_SIZE {
        return Err(NcError::PartitionRange { k: moments.len() });
    }
    let mut kappa: Vec<Complex64> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let mut rest = Complex64::new(0.0, 0.0);
        for (sizes, count) in block_profiles(n)? {
            if sizes.len() == 1 {
                continue;
            }
            rest += product_over_blocks(&sizes, &kappa) * count as f64;
        }
        kappa.push(moments[n - 1] - rest);
    }
    Ok(kappa)
}

/// Moments `m₁ … m_k` from free cumulants by the non-crossing partition sum.
pub fn moments_from_cumulants(kappa: &[Complex64]) -> Result<Vec<Complex64>, NcError> {
    if kappa.len() > MAX_PARTITION_SIZE {
        return Err(NcError::PartitionRange { k: kappa.len() });
    }
    (1..=kappa.len())
        .map(|n| {
            Ok(block_profiles(n)?
                .iter()
                .map(|(sizes, &count)| product_over_blocks(sizes, kappa) * count as f64)
                .sum())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Brute force: every set partition via restricted growth strings.
    fn all_set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
        fn go(k: usize, i: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
            if i == k {
                let nb = labels.iter().max().map_or(0, |m| m + 1);
                let mut blocks = vec![Vec::new(); nb];
                for (x, &l) in labels.iter().enumerate() {
                    blocks[l].push(x + 1);
                }
                out.push(blocks);
                return;
            }
            let limit = labels.iter().max().map_or(0, |m| m + 1);
            for l in 0..=limit {
                labels.push(l);
                go(k, i + 1, labels, out);
                labels.pop();
            }
        }
        let mut out = Vec::new();
        go(k, 0, &mut Vec::new(), &mut out);
        out
    }

    /// Brute force crossing test over all quadruples.
    fn is_crossing(blocks: &[Vec<usize>]) -> bool {
        let k: usize = blocks.iter().map(Vec::len).sum();
        let mut owner = vec![0; k + 1];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                owner[x] = i;
            }
        }
        for a in 1..=k {
            for b in a + 1..=k {
                for c in b + 1..=k {
                    for d in c + 1..=k {
                        if owner[a] == owner[c] && owner[b] == owner[d] && owner[a] != owner[b] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn brute_nc(k: usize) -> Vec<Vec<Vec<usize>>> {
        all_set_partitions(k).into_iter().filter(|p| !is_crossing(p)).collect()
    }

    fn brute_moments(kappa: &[Complex64]) -> Vec<Complex64> {
        (1..=kappa.len())
            .map(|n| {
                brute_nc(n)
                    .iter()
                    .map(|p| p.iter().map(|b| kappa[b.len() - 1]).product::<Complex64>())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn small_counts() {
        assert_eq!(noncrossing_partitions(1).unwrap().len(), 1);
        assert_eq!(all_set_partitions(3).len(), 5);
        assert_eq!(noncrossing_partitions(3).unwrap().len(), 5);
        assert_eq!(all_set_partitions(4).len(), 15);
        let crossing: Vec<_> = all_set_partitions(4).into_iter().filter(|p| is_crossing(p)).collect();
        assert_eq!(crossing, vec![vec![vec![1, 3], vec![2, 4]]]);
        assert_eq!(noncrossing_partitions(4).unwrap().len(), 14);
    }

    #[test]
    fn matches_brute_force_and_catalan() {
        let catalan = [1, 2, 5, 14, 42, 132, 429, 1430];
        for k in 1..=8 {
            let fast = noncrossing_partitions(k).unwrap();
            let mut fast_blocks: Vec<_> = fast.iter().map(|p| p.blocks().to_vec()).collect();
            let mut slow = brute_nc(k);
            fast_blocks.sort();
            slow.sort();
            assert_eq!(fast_blocks, slow, "k={k}");
            assert_eq!(fast.len(), catalan[k - 1]);
            let mut dedup = fast_blocks.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), fast_blocks.len());
        }
    }

    #[test]
    fn range_guard() {
        assert!(noncrossing_partitions(0).is_err());
        assert!(noncrossing_partitions(13).is_err());
        assert_eq!(noncrossing_partitions(12).unwrap().len(), 208_012);
    }

    #[test]
    fn unit_moments() {
        let k = free_cumulants(&[r(1.0); 6]).unwrap();
        assert!((k[0] - r(1.0)).norm() < 1e-14);
        assert!(k[1..].iter().all(|z| z.norm() < 1e-12));
        let back = brute_moments(&k);
        assert!(back.iter().all(|m| (m - r(1.0)).norm() < 1e-12));
    }

    #[test]
    fn semicircle_moments() {
        let m = [0.0, 1.0, 0.0, 2.0, 0.0, 5.0].map(r);
        let k = free_cumulants(&m).unwrap();
        for (i, z) in k.iter().enumerate() {
            let expect = if i == 1 { 1.0 } else { 0.0 };
            assert!((z - r(expect)).norm() < 1e-12, "κ_{} = {z}", i + 1);
        }
        let back = brute_moments(&k);
        for (a, b) in back.iter().zip(&m) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn point_mass_moments() {
        let c = Complex64::new(0.7, -0.2);
        let m: Vec<Complex64> = (1..=6).map(|n| c.powu(n)).collect();
        let k = free_cumulants(&m).unwrap();
        assert!((k[0] - c).norm() < 1e-13);
        assert!(k[1..].iter().all(|z| z.norm() < 1e-12));
        let back = brute_moments(&k);
        for (a, b) in back.iter().zip(&m) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn moment_cumulant_roundtrip(vals in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=8)) {
            let m: Vec<Complex64> = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let k = free_cumulants(&m).unwrap();
            let back = moments_from_cumulants(&k).unwrap();
            for (a, b) in back.iter().zip(&m) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }

        #[test]
        fn partition_sum_matches_brute_force(vals in proptest::collection::vec(-1.0f64..1.0, 1..=6)) {
            let k: Vec<Complex64> = vals.iter().map(|&a| r(a)).collect();
            let fast = moments_from_cumulants(&k).unwrap();
            let slow = brute_moments(&k);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}
