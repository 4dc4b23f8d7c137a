//! Rearranging reduced sequences into few periodic runs.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// `(x₁y₁)^{n₁} ⋯ (x_k y_k)^{n_k} · tail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunWord {
    pub runs: Vec<(usize, usize, u64)>,
    pub tail: Option<usize>,
}

impl RunWord {
    pub fn expand(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for &(x, y, e) in &self.runs {
            for _ in 0..e {
                out.extend([x, y]);
            }
        }
        out.extend(self.tail);
        out
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|r| 2 * r.2).sum::<u64>() + self.tail.is_some() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Which arrangement [`reorder`] produced, by the count of the first letter
/// `a` in a sequence of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `a` at every other position: `(aβ₁)^{n₁} ⋯ (aβ_k)^{n_k}` then
    /// optionally `a`, one run per other letter.
    Alternating,
    /// `|w|_a = n/2` and the sequence ends with `a`:
    /// `(aβ₁)^{n₁}(β₂a)^{n₂} ⋯ (β_k a)^{n_k}`.
    Balanced,
    /// `|w|_a < n/2`: runs of pairs, at most one per unordered pair of
    /// letters, then optionally one letter.
    General,
}

/// A reduced sequence with the letter counts, first and last letter of `w`,
/// written as few periodic runs.
pub fn reorder(w: &[usize]) -> Result<(RunWord, Shape)> {
    let (&a, &c) = match (w.first(), w.last()) {
        (Some(a), Some(c)) => (a, c),
        _ => return Err(Error::EmptyInput),
    };
    if w.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::NotReduced("consecutive letters repeat".into()));
    }
    let n = w.len();
    let mut counts: Vec<(usize, u64)> = Vec::new();
    for &x in w {
        match counts.iter_mut().find(|e| e.0 == x) {
            Some(e) => e.1 += 1,
            None => counts.push((x, 1)),
        }
    }
    let na = counts[0].1 as usize;
    let others: Vec<(usize, u64)> = counts[1..].to_vec();
    if 2 * na == n + 1 {
        let runs = others.iter().map(|&(b, k)| (a, b, k)).collect();
        return Ok((RunWord { runs, tail: Some(a) }, Shape::Alternating));
    }
    if 2 * na == n && c != a {
        let mut runs: Vec<_> = others.iter().filter(|o| o.0 != c).map(|&(b, k)| (a, b, k)).collect();
        runs.extend(others.iter().filter(|o| o.0 == c).map(|&(b, k)| (a, b, k)));
        return Ok((RunWord { runs, tail: None }, Shape::Alternating));
    }
    if 2 * na == n {
        let mut runs = vec![(a, others[0].0, others[0].1)];
        runs.extend(others[1..].iter().map(|&(b, k)| (b, a, k)));
        return Ok((RunWord { runs, tail: None }, Shape::Balanced));
    }
    let (body, tail) = if n % 2 == 1 { (&w[..n - 1], Some(c)) } else { (w, None) };
    let mut groups: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for p in body.chunks(2) {
        *groups.entry((p[0].min(p[1]), p[0].max(p[1]))).or_default() += 1;
    }
    let end_ok = |last: usize| if tail.is_some() { last != c } else { last == c };
    let types: Vec<((usize, usize), u64)> = groups.into_iter().collect();
    if let Some(runs) = arrange(a, &types, &end_ok) {
        return Ok((RunWord { runs, tail }, Shape::General));
    }
    for i in 0..types.len() {
        if types[i].1 < 2 {
            continue;
        }
        let mut split = types.clone();
        split[i].1 -= 1;
        split.push((types[i].0, 1));
        if let Some(runs) = arrange(a, &split, &end_ok) {
            return Ok((RunWord { runs, tail }, Shape::General));
        }
    }
    Err(Error::InternalInvariantViolation("no arrangement of the pair runs".into()))
}

/// Orders and orients the pair groups so that the first run starts with `a`,
/// neighbouring runs do not repeat a letter, and the last letter satisfies
/// `end_ok`.
fn arrange(a: usize, types: &[((usize, usize), u64)], end_ok: &dyn Fn(usize) -> bool) -> Option<Vec<(usize, usize, u64)>> {
    fn go(
        types: &[((usize, usize), u64)],
        used: &mut Vec<bool>,
        prev: Option<usize>,
        a: usize,
        out: &mut Vec<(usize, usize, u64)>,
        end_ok: &dyn Fn(usize) -> bool,
    ) -> bool {
        if out.len() == types.len() {
            return prev.is_some_and(end_ok);
        }
        for i in 0..types.len() {
            if used[i] {
                continue;
            }
            let ((p, q), e) = types[i];
            for (x, y) in [(p, q), (q, p)] {
                let ok = match prev {
                    None => x == a,
                    Some(z) => z != x,
                };
                if ok {
                    used[i] = true;
                    out.push((x, y, e));
                    if go(types, used, Some(y), a, out, end_ok) {
                        return true;
                    }
                    out.pop();
                    used[i] = false;
                }
            }
        }
        false
    }
    let mut out = Vec::new();
    go(types, &mut vec![false; types.len()], None, a, &mut out, end_ok).then_some(out)
}
