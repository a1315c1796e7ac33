//! Small enumeration helpers: binomials, k-subsets, restricted growth strings.

use itertools::Itertools;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All `k`-subsets of `{0..n-1}` as increasing vectors, in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// All subsets of `{0..n-1}` as increasing vectors, in lexicographic order
/// (the empty set first).
pub fn all_subsets_lex(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..=n).flat_map(|k| k_subsets(n, k)).collect();
    out.sort();
    out
}

/// `base^exp`, saturating at `u128::MAX`.
pub fn pow_sat(base: u128, exp: u128) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return u128::MAX,
        };
        if acc == 0 || (base <= 1) {
            return acc;
        }
    }
    acc
}

/// Bell number `B(n)`, saturating.
pub fn bell(n: usize) -> u128 {
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last.saturating_add(v));
        }
        row = next;
    }
    row[0]
}

/// Iterator over set partitions of `{0..n-1}` as restricted growth strings:
/// `s[0] = 0` and `s[i] <= 1 + max(s[..i])`. Lexicographic order.
#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    current: Vec<usize>,
    // prefix maxima: max[i] = max(current[..=i])
    max: Vec<usize>,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(n: usize) -> Self {
        RestrictedGrowth {
            current: vec![0; n],
            max: vec![0; n],
            done: false,
        }
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let n = self.current.len();
        // advance: rightmost position that can still grow
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] <= self.max[i - 1] {
                self.current[i] += 1;
                self.max[i] = self.max[i - 1].max(self.current[i]);
                for k in i + 1..n {
                    self.current[k] = 0;
                    self.max[k] = self.max[i];
                }
                break;
            }
        }
        Some(out)
    }
}

pub(crate) trait ProductOrUnit<'a, T: 'a> {
    /// Cartesian product that yields one empty tuple for zero factors.
    fn multi_cartesian_product_or_unit(self) -> Box<dyn Iterator<Item = Vec<&'a T>> + 'a>;
}

impl<'a, T: 'a, I, J> ProductOrUnit<'a, T> for I
where
    I: Iterator<Item = J>,
    J: Iterator<Item = &'a T> + Clone + 'a,
{
    fn multi_cartesian_product_or_unit(self) -> Box<dyn Iterator<Item = Vec<&'a T>> + 'a> {
        let factors: Vec<J> = self.collect();
        if factors.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(factors.into_iter().multi_cartesian_product())
        }
    }
}
