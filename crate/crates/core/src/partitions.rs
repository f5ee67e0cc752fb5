//! Plane partitions (fixed points of `Hilb(C^3)`) and solid partitions
//! (fixed points of `Hilb(C^4)`).
//!
//! Both are generated by stacking monotone layers: a plane partition is a
//! sequence of integer partitions (its rows), each dominated by the previous
//! one, and a solid partition is a sequence of plane partitions (its slabs in
//! the `k` direction), each dominated pointwise by the previous one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest size the enumerators are meant for.
pub const MAX_SIZE: usize = 8;

/// Heights `rows[i][j] = lambda_{i+1, j+1} >= 1`, non-increasing along rows
/// and columns. Empty rows are not stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanePartition {
    rows: Vec<Vec<u32>>,
}

/// Heights `heights[i][j][k] = pi_{i+1, j+1, k+1} >= 1`, non-increasing in
/// each of `i`, `j`, `k`. Empty trailing entries are not stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolidPartition {
    heights: Vec<Vec<Vec<u32>>>,
}

impl PlanePartition {
    /// Builds and validates; zero heights are trimmed.
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Option<Self> {
        let rows: Vec<Vec<u32>> = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|&h| h > 0).collect::<Vec<_>>())
            .filter(|r| !r.is_empty())
            .collect();
        let p = PlanePartition { rows };
        p.is_valid().then_some(p)
    }

    pub fn empty() -> Self {
        PlanePartition::default()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn height(&self, i: usize, j: usize) -> u32 {
        self.rows.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.rows.iter().flatten().map(|&h| h as usize).sum()
    }

    pub fn is_valid(&self) -> bool {
        for (i, row) in self.rows.iter().enumerate() {
            if row.is_empty() || row.contains(&0) {
                return false;
            }
            if row.windows(2).any(|w| w[0] < w[1]) {
                return false;
            }
            if i > 0 && (0..row.len()).any(|j| self.height(i - 1, j) < row[j]) {
                return false;
            }
        }
        true
    }

    /// Zero-based boxes `(i, j, k)`.
    pub fn boxes(&self) -> impl Iterator<Item = [u32; 3]> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(j, &h)| (0..h).map(move |k| [i as u32, j as u32, k]))
        })
    }

    /// `self <= other` entrywise.
    pub fn dominated_by(&self, other: &PlanePartition) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &h)| h <= other.height(i, j)))
    }

    /// Heights over the `n x n` grid, row-major.
    fn flattened(&self, n: usize) -> Vec<u32> {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.height(i, j)).collect()
    }
}

impl SolidPartition {
    pub fn from_heights(heights: Vec<Vec<Vec<u32>>>) -> Option<Self> {
        let heights: Vec<Vec<Vec<u32>>> = heights
            .into_iter()
            .map(|plane| {
                plane
                    .into_iter()
                    .map(|col| col.into_iter().filter(|&h| h > 0).collect::<Vec<_>>())
                    .filter(|c| !c.is_empty())
                    .collect::<Vec<_>>()
            })
            .filter(|p| !p.is_empty())
            .collect();
        let p = SolidPartition { heights };
        p.is_valid().then_some(p)
    }

    /// Builds from `k`-slabs, slab `k` holding `pi_{i, j, k+1}`.
    fn from_slabs(slabs: &[&PlanePartition]) -> Self {
        let Some(first) = slabs.first() else {
            return SolidPartition::default();
        };
        let heights = first
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (0..row.len())
                    .map(|j| slabs.iter().map(|s| s.height(i, j)).take_while(|&h| h > 0).collect())
                    .collect()
            })
            .collect();
        SolidPartition { heights }
    }

    pub fn empty() -> Self {
        SolidPartition::default()
    }

    pub fn heights(&self) -> &[Vec<Vec<u32>>] {
        &self.heights
    }

    pub fn height(&self, i: usize, j: usize, k: usize) -> u32 {
        self.heights
            .get(i)
            .and_then(|p| p.get(j))
            .and_then(|c| c.get(k))
            .copied()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.heights.iter().flatten().flatten().map(|&h| h as usize).sum()
    }

    pub fn is_valid(&self) -> bool {
        for (i, plane) in self.heights.iter().enumerate() {
            if plane.is_empty() {
                return false;
            }
            for (j, col) in plane.iter().enumerate() {
                if col.is_empty() {
                    return false;
                }
                for (k, &h) in col.iter().enumerate() {
                    if h == 0 {
                        return false;
                    }
                    if k > 0 && col[k - 1] < h {
                        return false;
                    }
                    if j > 0 && self.height(i, j - 1, k) < h {
                        return false;
                    }
                    if i > 0 && self.height(i - 1, j, k) < h {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Zero-based boxes `(i, j, k, l)`: box `(i,j,k,l)` carries the monomial
    /// `t1^i t2^j t3^k t4^l`.
    pub fn boxes(&self) -> impl Iterator<Item = [u32; 4]> + '_ {
        self.heights.iter().enumerate().flat_map(|(i, plane)| {
            plane.iter().enumerate().flat_map(move |(j, col)| {
                col.iter().enumerate().flat_map(move |(k, &h)| {
                    (0..h).map(move |l| [i as u32, j as u32, k as u32, l])
                })
            })
        })
    }

    fn flattened(&self, n: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(self.height(i, j, k));
                }
            }
        }
        out
    }
}

impl fmt::Display for PlanePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.rows).unwrap())
    }
}

impl fmt::Debug for PlanePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Plane{self}")
    }
}

impl fmt::Display for SolidPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.heights).unwrap())
    }
}

impl fmt::Debug for SolidPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Solid{self}")
    }
}

/// Integer partitions of `n` as non-increasing vectors.
fn integer_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=cap.min(rest)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

fn row_dominated(row: &[u32], above: &[u32]) -> bool {
    row.len() <= above.len() && row.iter().zip(above).all(|(a, b)| a <= b)
}

/// Generic layer stacker: emits every sequence of nonempty layers
/// `L1 >= L2 >= ...` whose sizes sum to `n`. `layers[s]` lists the layers of
/// size `s`; `dominated(a, b)` tests `a <= b`.
fn stack_layers<T, F>(n: usize, layers: &[Vec<T>], dominated: &F) -> Vec<Vec<(usize, usize)>>
where
    F: Fn(&T, &T) -> bool,
{
    // Layers are addressed as (size, index) flattened into one id space.
    let ids: Vec<(usize, usize)> =
        (1..=n).flat_map(|s| (0..layers[s].len()).map(move |i| (s, i))).collect();
    let mut memo: HashMap<(usize, Option<usize>), Vec<Vec<usize>>> = HashMap::new();

    fn rec<T, F: Fn(&T, &T) -> bool>(
        rest: usize,
        prev: Option<usize>,
        ids: &[(usize, usize)],
        layers: &[Vec<T>],
        dominated: &F,
        memo: &mut HashMap<(usize, Option<usize>), Vec<Vec<usize>>>,
    ) -> Vec<Vec<usize>> {
        if rest == 0 {
            return vec![Vec::new()];
        }
        if let Some(hit) = memo.get(&(rest, prev)) {
            return hit.clone();
        }
        let mut out = Vec::new();
        for (id, &(size, _)) in ids.iter().enumerate() {
            if size > rest {
                continue;
            }
            if let Some(p) = prev {
                if size > ids[p].0 || !dominated(&layers[size][ids[id].1], &layers[ids[p].0][ids[p].1]) {
                    continue;
                }
            }
            for tail in rec(rest - size, Some(id), ids, layers, dominated, memo) {
                let mut seq = Vec::with_capacity(tail.len() + 1);
                seq.push(id);
                seq.extend(tail);
                out.push(seq);
            }
        }
        memo.insert((rest, prev), out.clone());
        out
    }

    rec(n, None, &ids, layers, dominated, &mut memo)
        .into_iter()
        .map(|seq| seq.into_iter().map(|id| ids[id]).collect())
        .collect()
}

/// Every plane partition of size `n`, each once, in canonical order
/// (lexicographic on the row-major flattened heights).
pub fn enumerate_plane(n: usize) -> Vec<PlanePartition> {
    if n == 0 {
        return vec![PlanePartition::empty()];
    }
    let rows: Vec<Vec<Vec<u32>>> = (0..=n).map(integer_partitions).collect();
    let mut out: Vec<PlanePartition> = stack_layers(n, &rows, &|a: &Vec<u32>, b: &Vec<u32>| {
        row_dominated(a, b)
    })
    .into_iter()
    .map(|seq| PlanePartition {
        rows: seq
            .into_iter()
            .map(|(s, i)| rows[s][i].clone())
            .collect(),
    })
    .collect();
    out.sort_by_cached_key(|p| p.flattened(n));
    out
}

/// Every solid partition of size `n`, each once, in canonical order
/// (lexicographic on the `(i, j, k)` row-major flattened heights).
pub fn enumerate_solid(n: usize) -> Vec<SolidPartition> {
    if n == 0 {
        return vec![SolidPartition::empty()];
    }
    let slabs: Vec<Vec<PlanePartition>> = (0..=n).map(enumerate_plane).collect();
    let mut out: Vec<SolidPartition> =
        stack_layers(n, &slabs, &|a: &PlanePartition, b: &PlanePartition| a.dominated_by(b))
            .into_iter()
            .map(|seq| {
                let refs: Vec<&PlanePartition> = seq
                    .into_iter()
                    .map(|(s, i)| &slabs[s][i])
                    .collect();
                SolidPartition::from_slabs(&refs)
            })
            .collect();
    out.sort_by_cached_key(|p| p.flattened(n));
    out
}

/// If every box of `pi` lies in the divisor `l = 1` (all heights equal 1),
/// the plane partition `lambda_{ij} = #{k : pi_{ijk} = 1}`.
pub fn divisor_support(pi: &SolidPartition) -> Option<PlanePartition> {
    if pi.heights.iter().flatten().flatten().any(|&h| h != 1) {
        return None;
    }
    let rows = pi
        .heights
        .iter()
        .map(|plane| plane.iter().map(|col| col.len() as u32).collect())
        .collect();
    Some(PlanePartition { rows })
}

/// Inverse of [`divisor_support`]: lift a plane partition into the `l = 1`
/// layer of a solid partition.
pub fn lift_plane(lambda: &PlanePartition) -> SolidPartition {
    SolidPartition {
        heights: lambda
            .rows
            .iter()
            .map(|row| row.iter().map(|&h| vec![1; h as usize]).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_partition_counts() {
        let counts: Vec<usize> = (0..8).map(|n| integer_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_solid(0).len(), 1);
        assert_eq!(enumerate_solid(2).len(), 4);
        assert_eq!(enumerate_plane(1).len(), 1);
        assert_eq!(enumerate_plane(3).len(), 6);
    }

    #[test]
    fn divisor_support_examples() {
        let single = SolidPartition::from_heights(vec![vec![vec![1]]]).unwrap();
        assert_eq!(divisor_support(&single).unwrap(), PlanePartition::from_rows(vec![vec![1]]).unwrap());
        let tall = SolidPartition::from_heights(vec![vec![vec![2]]]).unwrap();
        assert_eq!(divisor_support(&tall), None);
        // pi_111 = pi_121 = pi_112 = 1
        let three = SolidPartition::from_heights(vec![vec![vec![1, 1], vec![1]]]).unwrap();
        let lam = divisor_support(&three).unwrap();
        assert_eq!(lam, PlanePartition::from_rows(vec![vec![2, 1]]).unwrap());
        assert!(lam.is_valid());
        assert_eq!(lift_plane(&lam), three);
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(PlanePartition::from_rows(vec![vec![1, 2]]).is_none());
        assert!(PlanePartition::from_rows(vec![vec![1], vec![2]]).is_none());
        assert!(SolidPartition::from_heights(vec![vec![vec![1, 2]]]).is_none());
        assert!(SolidPartition::from_heights(vec![vec![vec![1]], vec![vec![1], vec![1]]]).is_none());
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let ps = enumerate_solid(3);
        let keys: Vec<Vec<u32>> = ps.iter().map(|p| p.flattened(3)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
