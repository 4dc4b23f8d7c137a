//! Cuts, maximal free intervals and generic solutions.
//!
//! Every equation `Lᵢ = Rᵢ` has its own word `wᵢ = σ(Lᵢ) = σ(Rᵢ)`; positions
//! are pairs (equation, offset). Two occurrences of the same variable (or of
//! a variable and its inverse) identify their spans by a shift (or a
//! reflection), and these transport maps generate `≈` on intervals.

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::{Alphabet, Letter, VarRef, Word};
use crate::error::{Error, Result};

use super::{EquationSystem, Solution};

/// The span of one variable occurrence in its equation's word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub eq: usize,
    pub var: VarRef,
    pub left: usize,
    pub right: usize,
}

/// An interval between consecutive derived cuts, in its positive orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Atom {
    pub eq: usize,
    pub start: usize,
    pub end: usize,
    /// Class of `[start, end]`; the class of `[end, start]` is its `bar`.
    pub class: usize,
}

/// A `≈`-class of maximal free intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    pub word: Word,
    /// The class of the reversed intervals.
    pub bar: usize,
    /// Members as oriented intervals `(equation, from, to)`; `from > to`
    /// for reversed ones.
    pub members: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Default)]
pub struct CutDecomposition {
    pub words: Vec<Word>,
    pub occurrences: Vec<Occurrence>,
    /// Sorted cuts per equation, including 0 and `|wᵢ|`.
    pub cuts: Vec<Vec<usize>>,
    /// Closure of the cuts under transport; empty until
    /// [`maximal_free_intervals`] runs.
    pub derived_cuts: Vec<Vec<usize>>,
    pub atoms: Vec<Atom>,
    pub classes: Vec<Class>,
}

impl CutDecomposition {
    /// Number of classes counting `c` and `c̄` once.
    pub fn classes_up_to_involution(&self) -> usize {
        (0..self.classes.len()).filter(|&c| c <= self.classes[c].bar).count()
    }

    /// Pairs of occurrences whose spans are identified, with `true` for a
    /// reflection.
    pub(crate) fn transports(&self) -> Vec<(usize, usize, bool)> {
        let mut by_var: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, o) in self.occurrences.iter().enumerate() {
            by_var.entry(o.var.var.0).or_default().push(i);
        }
        let mut out = Vec::new();
        let mut keys: Vec<_> = by_var.keys().copied().collect();
        keys.sort();
        for k in keys {
            let occ = &by_var[&k];
            for &i in occ {
                for &j in occ {
                    if i != j {
                        out.push((i, j, self.occurrences[i].var.bar != self.occurrences[j].var.bar));
                    }
                }
            }
        }
        out
    }

    /// Image of position `p` of occurrence `i`'s span in occurrence `j`.
    pub(crate) fn transport(&self, i: usize, j: usize, reflect: bool, p: usize) -> usize {
        let (oi, oj) = (&self.occurrences[i], &self.occurrences[j]);
        if reflect {
            oj.right - (p - oi.left)
        } else {
            oj.left + (p - oi.left)
        }
    }

    /// The atom starting at `start` in equation `eq`.
    pub fn atom_at(&self, eq: usize, start: usize) -> Option<usize> {
        let first = self.atoms.partition_point(|a| (a.eq, a.start) < (eq, start));
        (first < self.atoms.len() && self.atoms[first].eq == eq && self.atoms[first].start == start).then_some(first)
    }
}

/// Cuts and occurrence spans of every equation under `σ`.
pub fn compute_cuts(system: &EquationSystem, sigma: &Solution) -> Result<CutDecomposition> {
    let mut dec = CutDecomposition::default();
    for (e, eq) in system.equations.iter().enumerate() {
        let l = sigma.eval_side(system, &eq.lhs)?;
        let r = sigma.eval_side(system, &eq.rhs)?;
        if l != r {
            return Err(Error::NotASolution(format!("equation {} has sides of different value", e + 1)));
        }
        let mut cuts = BTreeSet::from([0, l.len()]);
        for side in [&eq.lhs, &eq.rhs] {
            let mut pos = 0;
            for &x in side.iter() {
                let n = sigma.eval(system, x)?.len();
                dec.occurrences.push(Occurrence { eq: e, var: x, left: pos, right: pos + n });
                pos += n;
                cuts.insert(pos);
            }
        }
        dec.cuts.push(cuts.into_iter().collect());
        dec.words.push(l);
    }
    Ok(dec)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Fills in derived cuts, atoms and classes.
///
/// An interval is free iff no derived cut lies strictly inside it, so the
/// maximal free intervals are exactly the atoms and their reversals.
pub fn maximal_free_intervals(dec: &mut CutDecomposition, alphabet: &Alphabet) {
    let transports = dec.transports();
    let mut derived: Vec<BTreeSet<usize>> = dec.cuts.iter().map(|c| c.iter().copied().collect()).collect();
    let mut todo: Vec<(usize, usize)> =
        dec.cuts.iter().enumerate().flat_map(|(e, c)| c.iter().map(move |&p| (e, p))).collect();
    while let Some((e, p)) = todo.pop() {
        for &(i, j, reflect) in &transports {
            let oi = dec.occurrences[i];
            if oi.eq == e && oi.left < p && p < oi.right {
                let q = dec.transport(i, j, reflect, p);
                let ej = dec.occurrences[j].eq;
                if derived[ej].insert(q) {
                    todo.push((ej, q));
                }
            }
        }
    }
    dec.derived_cuts = derived.iter().map(|s| s.iter().copied().collect()).collect();
    dec.atoms.clear();
    for (e, d) in dec.derived_cuts.iter().enumerate() {
        for w in d.windows(2) {
            dec.atoms.push(Atom { eq: e, start: w[0], end: w[1], class: 0 });
        }
    }
    // node 2k is atom k read forwards, 2k+1 backwards
    let mut uf = UnionFind((0..2 * dec.atoms.len()).collect());
    for &(i, j, reflect) in &transports {
        let (oi, oj) = (dec.occurrences[i], dec.occurrences[j]);
        let first = dec.atom_at(oi.eq, oi.left);
        let Some(first) = first else { continue };
        for k in first..dec.atoms.len() {
            let a = dec.atoms[k];
            if a.eq != oi.eq || a.end > oi.right {
                break;
            }
            let (s, t) = (dec.transport(i, j, reflect, a.start), dec.transport(i, j, reflect, a.end));
            let k2 = dec.atom_at(oj.eq, s.min(t)).expect("transported atoms are atoms");
            if reflect {
                uf.union(2 * k, 2 * k2 + 1);
                uf.union(2 * k + 1, 2 * k2);
            } else {
                uf.union(2 * k, 2 * k2);
                uf.union(2 * k + 1, 2 * k2 + 1);
            }
        }
    }
    let mut id: HashMap<usize, usize> = HashMap::new();
    let mut node_class = vec![0; 2 * dec.atoms.len()];
    for (node, class) in node_class.iter_mut().enumerate() {
        let root = uf.find(node);
        let next = id.len();
        *class = *id.entry(root).or_insert(next);
    }
    let mut classes: Vec<Option<Class>> = vec![None; id.len()];
    for (k, a) in dec.atoms.iter_mut().enumerate() {
        a.class = node_class[2 * k];
        for (node, (from, to)) in [(2 * k, (a.start, a.end)), (2 * k + 1, (a.end, a.start))] {
            let c = node_class[node];
            let bar = node_class[node ^ 1];
            let entry = classes[c].get_or_insert_with(|| {
                let w = dec.words[a.eq].factor(alphabet, from, to);
                Class { word: w, bar, members: Vec::new() }
            });
            entry.members.push((a.eq, from, to));
        }
    }
    dec.classes = classes.into_iter().map(Option::unwrap).collect();
}

/// The generic solution over one letter per class.
#[derive(Debug, Clone)]
pub struct GenericSolution {
    /// `Γ̃`: letters `g1, g2, …` with inverses `G1, G2, …`.
    pub alphabet: Alphabet,
    /// Letter of each class.
    pub letters: Vec<Letter>,
    /// `ω`, indexed by letter.
    pub omega: Vec<Word>,
    /// `σ̃`, indexed by variable; `None` for variables in no equation.
    pub sigma: Vec<Option<Word>>,
    /// `σ̃(Lᵢ)` per equation.
    pub words: Vec<Word>,
}

impl GenericSolution {
    /// `ω(w)`.
    pub fn interpret(&self, w: &Word) -> Word {
        Word(w.letters().iter().flat_map(|a| self.omega[a.index()].0.iter().copied()).collect())
    }

    /// Length `Ñ` of the generic words, summed over equations.
    pub fn length(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }
}

pub fn generic_solution(dec: &CutDecomposition, system: &EquationSystem) -> GenericSolution {
    let mut alphabet = Alphabet::new();
    let mut letters: Vec<Option<Letter>> = vec![None; dec.classes.len()];
    let mut n = 0;
    for c in 0..dec.classes.len() {
        if letters[c].is_some() {
            continue;
        }
        n += 1;
        let bar = dec.classes[c].bar;
        if bar == c {
            letters[c] = Some(alphabet.add_self_inverse(&format!("g{n}")).unwrap());
        } else {
            let a = alphabet.add_pair(&format!("g{n}"), &format!("G{n}")).unwrap();
            letters[c] = Some(a);
            letters[bar] = Some(alphabet.bar(a));
        }
    }
    let letters: Vec<Letter> = letters.into_iter().map(Option::unwrap).collect();
    let mut omega = vec![Word::empty(); alphabet.len()];
    for (c, class) in dec.classes.iter().enumerate() {
        omega[letters[c].index()] = class.word.clone();
    }
    let words: Vec<Word> = (0..dec.words.len())
        .map(|e| Word(dec.atoms.iter().filter(|a| a.eq == e).map(|a| letters[a.class]).collect()))
        .collect();
    let mut sigma: Vec<Option<Word>> = vec![None; system.variables.len()];
    for o in &dec.occurrences {
        if sigma[o.var.var.index()].is_some() {
            continue;
        }
        let from = dec.atom_at(o.eq, o.left);
        let mut w = Vec::new();
        if o.left < o.right {
            for a in &dec.atoms[from.expect("occurrence starts at a cut")..] {
                if a.eq != o.eq || a.end > o.right {
                    break;
                }
                w.push(letters[a.class]);
            }
        }
        let w = Word(w);
        sigma[o.var.var.index()] = Some(if o.var.bar { w.inverse(&alphabet) } else { w });
    }
    GenericSolution { alphabet, letters, omega, sigma, words }
}
