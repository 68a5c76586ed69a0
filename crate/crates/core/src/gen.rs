//! Deterministic generators for canonical witness structures.
//!
//! Indices are 1-based in labels (`a1`, `b3`, …) and 0-based in the
//! relation itself. The random generator uses SplitMix64 so that its output
//! is reproducible bit for bit on every platform:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15            (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB      (wrapping)
//! output z ^ (z >> 31)
//! ```
//!
//! The initial state is the seed. Entries are drawn in row-major order; an
//! entry is 1 iff `(output * p_den) >> 64 < p_num` computed in 128 bits.

use serde::Serialize;
use thiserror::Error;

use crate::relcore::BitRelation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("size parameter {name} must be at least {min}, got {value}")]
    TooSmall {
        name: &'static str,
        min: usize,
        value: usize,
    },
    #[error("probability {num}/{den} is not in [0, 1]")]
    Probability { num: u64, den: u64 },
    #[error("family member {set} contains {value}, outside 1..={n}")]
    FamilyElement { set: usize, value: usize, n: usize },
    #[error("dimension {0} exceeds the supported limit")]
    TooLarge(usize),
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` by 128-bit multiply-shift. `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// `true` with probability `num / den`.
    pub fn bernoulli(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Generator selection, as accepted by the `gen` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    HalfGraph {
        n: usize,
    },
    Powerset {
        d: usize,
    },
    StrictChain {
        n: usize,
    },
    RandomBipartite {
        m: usize,
        n: usize,
        p_num: u64,
        p_den: u64,
        seed: u64,
    },
    Example1 {
        n: usize,
    },
    Example2 {
        n: usize,
        family: Option<Vec<Vec<usize>>>,
    },
    Constant {
        m: usize,
        n: usize,
        value: bool,
    },
}

impl GenSpec {
    pub fn build(&self) -> Result<BitRelation, GenError> {
        match self {
            GenSpec::HalfGraph { n } => {
                at_least("n", *n, 1)?;
                Ok(half_graph(*n))
            }
            GenSpec::Powerset { d } => {
                if *d > 20 {
                    return Err(GenError::TooLarge(*d));
                }
                Ok(powerset(*d))
            }
            GenSpec::StrictChain { n } => {
                at_least("n", *n, 1)?;
                Ok(strict_chain(*n))
            }
            GenSpec::RandomBipartite {
                m,
                n,
                p_num,
                p_den,
                seed,
            } => random_bipartite(*m, *n, *p_num, *p_den, *seed),
            GenSpec::Example1 { n } => example1(*n),
            GenSpec::Example2 { n, family } => {
                let family = match family {
                    Some(f) => f.clone(),
                    None => suffix_family(*n),
                };
                example2(*n, &family)
            }
            GenSpec::Constant { m, n, value } => Ok(constant(*m, *n, *value)),
        }
    }
}

fn at_least(name: &'static str, value: usize, min: usize) -> Result<(), GenError> {
    if value < min {
        return Err(GenError::TooSmall { name, min, value });
    }
    Ok(())
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn labelled(rel: BitRelation, rows: Vec<String>, cols: Vec<String>) -> BitRelation {
    rel.with_labels(Some(rows), Some(cols))
        .expect("generator labels are unique by construction")
}

/// `n × n`, entry `(a_i, b_j)` is 1 iff `i < j`.
pub fn half_graph(n: usize) -> BitRelation {
    labelled(
        BitRelation::from_fn(n, n, |i, j| i < j),
        labels("a", n),
        labels("b", n),
    )
}

/// `d` rows × `2^d` columns; column `s` (binary counter) has a 1 at row `r` iff bit `r` of `s` is set.
pub fn powerset(d: usize) -> BitRelation {
    BitRelation::from_fn(d, 1 << d, |r, s| s >> r & 1 == 1)
}

/// The order `x < y` on `n` elements; rows and columns share labels.
pub fn strict_chain(n: usize) -> BitRelation {
    let l = labels("e", n);
    labelled(BitRelation::from_fn(n, n, |i, j| i < j), l.clone(), l)
}

pub fn constant(m: usize, n: usize, value: bool) -> BitRelation {
    BitRelation::from_fn(m, n, |_, _| value)
}

pub fn random_bipartite(
    m: usize,
    n: usize,
    p_num: u64,
    p_den: u64,
    seed: u64,
) -> Result<BitRelation, GenError> {
    if p_den == 0 || p_num > p_den {
        return Err(GenError::Probability {
            num: p_num,
            den: p_den,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let entries: Vec<u8> = (0..m * n)
        .map(|_| rng.bernoulli(p_num, p_den) as u8)
        .collect();
    Ok(BitRelation::new(m, n, &entries).expect("entries sized m*n"))
}

/// Levels `k` with `2^k + k ≤ len`.
pub fn included_levels(len: usize) -> Vec<usize> {
    (0..usize::BITS as usize - 1)
        .take_while(|&k| (1usize << k) + k <= len)
        .collect()
}

/// Single-sorted structure on `A ∪ B`, `A = {a_1..a_n}`, `B = {b_k : 2^k + k ≤ n}`.
///
/// `R(a_i, a_j)` iff `i < j`; `R(a_{2^k+i}, b_k)` iff `i` is even, for `0 ≤ i ≤ k`;
/// every other pair is 0. Rows and columns list `a_1..a_n` then `b_k` by ascending `k`.
pub fn example1(n: usize) -> Result<BitRelation, GenError> {
    at_least("n", n, 2)?;
    let all: Vec<usize> = (1..=n).collect();
    let mut gadgets = Vec::new();
    layered_gadgets(&all, |k, a, bit| gadgets.push((k, a, bit)));
    let levels = included_levels(n);
    let size = n + levels.len();
    let mut rel_ones = vec![false; size * size];
    for i in 0..n {
        for j in i + 1..n {
            rel_ones[i * size + j] = true;
        }
    }
    for (k, a, bit) in gadgets {
        rel_ones[(a - 1) * size + n + k] = bit;
    }
    let mut names = labels("a", n);
    names.extend(levels.iter().map(|k| format!("b{k}")));
    let entries: Vec<u8> = rel_ones.into_iter().map(u8::from).collect();
    let rel = BitRelation::new(size, size, &entries).expect("square by construction");
    Ok(labelled(rel, names.clone(), names))
}

/// Calls `emit(k, a, bit)` for each level `k` included for the enumeration
/// `index_set = (I_1 < I_2 < …)` and each `0 ≤ i ≤ k`, with `a = I_{2^k+i}`.
fn layered_gadgets(index_set: &[usize], mut emit: impl FnMut(usize, usize, bool)) {
    for k in included_levels(index_set.len()) {
        for i in 0..=k {
            emit(k, index_set[(1 << k) + i - 1], i % 2 == 0);
        }
    }
}

/// The default finite family for [`example2`]: all suffixes `{t..n}`.
pub fn suffix_family(n: usize) -> Vec<Vec<usize>> {
    (1..=n).map(|t| (t..=n).collect()).collect()
}

/// `A ∪ ⋃_I B_I` where each `B_I` carries the layered gadgets of [`example1`]
/// relative to the enumeration of `I`. Family members are 1-based subsets of `{1..n}`.
///
/// Column/row order: `a_1..a_n`, then for each family member in order its
/// `b^I_k` by ascending `k`, labelled `b{k}.I{index}`.
pub fn example2(n: usize, family: &[Vec<usize>]) -> Result<BitRelation, GenError> {
    at_least("n", n, 1)?;
    let mut members = Vec::with_capacity(family.len());
    for (idx, set) in family.iter().enumerate() {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&v| v == 0 || v > n) {
            return Err(GenError::FamilyElement {
                set: idx + 1,
                value: bad,
                n,
            });
        }
        members.push(sorted);
    }
    let mut names = labels("a", n);
    let mut ones: Vec<(usize, usize)> = Vec::new();
    for (idx, set) in members.iter().enumerate() {
        let base = names.len();
        let levels = included_levels(set.len());
        names.extend(levels.iter().map(|k| format!("b{k}.I{}", idx + 1)));
        layered_gadgets(set, |k, a, bit| {
            if bit {
                ones.push((a - 1, base + k));
            }
        });
    }
    let size = names.len();
    let mut grid = vec![0u8; size * size];
    for i in 0..n {
        for j in i + 1..n {
            grid[i * size + j] = 1;
        }
    }
    for (r, c) in ones {
        grid[r * size + c] = 1;
    }
    let rel = BitRelation::new(size, size, &grid).expect("square by construction");
    Ok(labelled(rel, names.clone(), names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_stream() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xe220a8397b1dcdaf);
        assert_eq!(rng.next_u64(), 0x6e789e6aa1b965f4);
        assert_eq!(rng.next_u64(), 0x06c45d188009454f);
    }

    fn rows(rel: &BitRelation) -> Vec<String> {
        (0..rel.n_rows())
            .map(|i| {
                (0..rel.n_cols())
                    .map(|j| if rel.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of SplitMix64 seeded with 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn half_graph_and_chain() {
        assert_eq!(rows(&half_graph(2)), vec!["01", "00"]);
        assert_eq!(rows(&half_graph(1)), vec!["0"]);
        assert_eq!(rows(&strict_chain(3)), vec!["011", "001", "000"]);
        let chain = strict_chain(3);
        assert_eq!(chain.row_labels(), chain.col_labels());
    }

    #[test]
    fn powerset_shape() {
        assert_eq!(rows(&powerset(1)), vec!["01"]);
        let p0 = powerset(0);
        assert_eq!((p0.n_rows(), p0.n_cols()), (0, 1));
        assert_eq!(rows(&powerset(2)), vec!["0101", "0011"]);
    }

    #[test]
    fn random_extremes_and_reproducibility() {
        assert_eq!(random_bipartite(4, 5, 0, 3, 9).unwrap().count_ones(), 0);
        assert_eq!(random_bipartite(4, 5, 3, 3, 9).unwrap().count_ones(), 20);
        assert_eq!(
            random_bipartite(12, 12, 1, 2, 42).unwrap(),
            random_bipartite(12, 12, 1, 2, 42).unwrap()
        );
        assert!(random_bipartite(2, 2, 3, 2, 0).is_err());
        assert!(random_bipartite(2, 2, 0, 0, 0).is_err());
    }

    #[test]
    fn random_seed_42_golden() {
        let rel = random_bipartite(12, 12, 1, 2, 42).unwrap();
        // Computed by an independent script implementing the documented rule.
        let expected = [
            "011110101011",
            "000111100100",
            "110000000001",
            "110101100111",
            "001111100001",
            "100110010000",
            "100010111011",
            "010000011001",
            "010101000111",
            "101010111010",
            "001111111001",
            "010000110000",
        ];
        assert_eq!(rows(&rel), expected);
    }

    #[test]
    fn example1_small() {
        let rel = example1(2).unwrap();
        // A = {a1, a2}, B = {b0} since 2^0 + 0 <= 2 but 2^1 + 1 > 2.
        assert_eq!(rel.n_rows(), 3);
        assert_eq!(rows(&rel), vec!["011", "000", "000"]);
        assert!(example1(1).is_err());
    }

    #[test]
    fn example1_levels_for_16() {
        assert_eq!(included_levels(16), vec![0, 1, 2, 3]);
        assert_eq!(example1(16).unwrap().n_rows(), 20);
    }

    #[test]
    fn example1_invariants() {
        for n in [2, 5, 11, 16, 24, 32] {
            let rel = example1(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(rel.get(i, j), i < j);
                }
            }
            for b in n..rel.n_rows() {
                assert!(rel.row_ones(b).is_clear());
            }
            for (offset, k) in included_levels(n).into_iter().enumerate() {
                let col = rel.col_ones(n + offset);
                assert_eq!(col.count_ones(..), k / 2 + 1);
                let lo = (1 << k) - 1;
                assert!(col.ones().all(|r| r >= lo && r <= lo + k));
            }
        }
    }

    #[test]
    fn example2_single_member_is_example1() {
        let n = 12;
        let e1 = example1(n).unwrap();
        let e2 = example2(n, &[(1..=n).collect()]).unwrap();
        assert_eq!(e1.entries(), e2.entries());
        assert_eq!(e2.row_labels().unwrap()[n], "b0.I1");
    }

    #[test]
    fn example2_chain_on_a_and_errors() {
        let n = 8;
        let rel = example2(n, &suffix_family(n)).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(rel.get(i, j), i < j);
            }
        }
        let empty = example2(4, &[]).unwrap();
        assert_eq!(empty.entries(), strict_chain(4).entries());
        assert!(matches!(
            example2(4, &[vec![1, 5]]),
            Err(GenError::FamilyElement { value: 5, .. })
        ));
    }

    #[test]
    fn example2_reindexes_by_member() {
        // I = {3,5,7}: b0 gets a_3, b1 gets a_5 (i=0) and not a_7 (i=1).
        let rel = example2(7, &[vec![7, 3, 5]]).unwrap();
        assert_eq!(rel.n_rows(), 9);
        let col = |c: usize| rel.col_ones(c).ones().collect::<Vec<_>>();
        assert_eq!(col(7), vec![2]);
        assert_eq!(col(8), vec![4]);
    }
}
