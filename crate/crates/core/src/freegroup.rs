//! Free reduction of compressed words, the compressed word problem, and
//! SLPs for images of letters under compositions of endomorphisms.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Letter, VarRef, Word};
use crate::error::{Error, Result};
use crate::num::{diff, Length};
use crate::query::longest_common_prefix;
use crate::slp::{Rule, Slp};

/// Output of [`reduce_slp`]: the input program extended by the reduced
/// variables, and `X ↦ X̂` for every input variable.
#[derive(Debug, Clone)]
pub struct Reduced<L> {
    pub slp: Slp<L>,
    pub hats: Vec<VarRef>,
}

impl<L: Length> Reduced<L> {
    pub fn hat(&self, x: VarRef) -> VarRef {
        self.hats[x.var.index()].flipped(x.bar)
    }
}

/// For every variable `X`, a variable `X̂` evaluating to the free reduction
/// of `eval(X)`.
///
/// For `X → Y Z` the cancellation between `Ŷ` and `Ẑ` has length
/// `k = lcp(eval(Ŷ)⁻¹, eval(Ẑ))`, and `X̂ = Ŷ[0,|Ŷ|−k] · Ẑ[k,|Ẑ|]`.
pub fn reduce_slp<L: Length>(slp: &Slp<L>) -> Result<Reduced<L>> {
    slp.alphabet().require_group()?;
    let mut out = slp.clone();
    let n = slp.num_vars();
    let mut hats: Vec<VarRef> = Vec::with_capacity(n);
    for v in slp.vars() {
        let hat = match slp.rule(v) {
            Rule::Terminal(_) => v.pos(),
            Rule::Pair(y, z) => {
                let yh = hats[y.var.index()].flipped(y.bar);
                let zh = hats[z.var.index()].flipped(z.bar);
                let k = longest_common_prefix(&out, yh.inverse(), zh);
                let left = out.prefix(yh, &diff(out.len(yh), &k))?;
                let right = out.suffix(zh, &diff(out.len(zh), &k))?;
                if left == y && right == z {
                    // nothing cancelled and both children already reduced
                    v.pos()
                } else {
                    let before = out.num_vars();
                    let h = out.concat(left, right)?;
                    if out.num_vars() > before {
                        let _ = out.rename(h.var, &format!("{}_hat", slp.name(v)));
                    }
                    h
                }
            }
        };
        hats.push(hat);
    }
    Ok(Reduced { slp: out, hats })
}

/// `eval(x) = 1` in the free group.
pub fn compressed_word_problem<L: Length>(slp: &Slp<L>, x: VarRef) -> Result<bool> {
    slp.alphabet().require_group()?;
    let (small, roots) = slp.prune(&[x]);
    let r = reduce_slp(&small)?;
    Ok(r.slp.len(r.hat(roots[0])).is_zero())
}

/// Named endomorphisms given by the images of the positive letters; images
/// of barred letters follow by the involution, unlisted letters are fixed.
#[derive(Debug, Clone, Default)]
pub struct EndomorphismTable {
    pub alphabet: Alphabet,
    pub maps: BTreeMap<String, BTreeMap<Letter, Word>>,
}

impl EndomorphismTable {
    pub fn new(alphabet: Alphabet) -> Self {
        EndomorphismTable { alphabet, maps: BTreeMap::new() }
    }

    /// Adds or extends `name` with `letter ↦ image` (`image` in the word syntax).
    pub fn set(&mut self, name: &str, letter: &str, image: &str) -> Result<()> {
        let a = self.alphabet.letter(letter).ok_or_else(|| Error::UnknownLetter(letter.to_string()))?;
        let w = self.alphabet.parse_word(image)?;
        let (a, w) = if self.alphabet.positives().any(|p| p == a) {
            (a, w)
        } else {
            (self.alphabet.bar(a), w.inverse(&self.alphabet))
        };
        self.maps.entry(name.to_string()).or_default().insert(a, w);
        Ok(())
    }

    /// Image of a positive letter under `name`.
    pub fn image(&self, name: &str, a: Letter) -> Result<Word> {
        let map = self.maps.get(name).ok_or_else(|| Error::UnknownEndomorphism(name.to_string()))?;
        Ok(map.get(&a).cloned().unwrap_or_else(|| Word(vec![a])))
    }

    fn check(&self, word: &[String]) -> Result<()> {
        for n in word {
            if !self.maps.contains_key(n) {
                return Err(Error::UnknownEndomorphism(n.clone()));
            }
        }
        Ok(())
    }
}

fn letter_tag(al: &Alphabet, a: Letter) -> String {
    let name = al.name(a);
    if name.chars().all(|c| c.is_ascii_alphanumeric()) {
        name.to_string()
    } else {
        format!("l{}", a.index())
    }
}

/// Adds the variables `A[i,b]` for `0 ≤ i ≤ n` to `slp` (names start with
/// `prefix`) and returns `A[n,b]` for every positive letter `b`.
fn push_schleimer<L: Length>(
    slp: &mut Slp<L>,
    table: &EndomorphismTable,
    word: &[String],
    prefix: &str,
) -> Result<BTreeMap<Letter, VarRef>> {
    table.check(word)?;
    let al = table.alphabet.clone();
    let positives: Vec<Letter> = al.positives().collect();
    let mut level: BTreeMap<Letter, VarRef> = BTreeMap::new();
    for &b in &positives {
        let name = format!("{prefix}0_{}", letter_tag(&al, b));
        level.insert(b, slp.push_terminal(Some(&name), Some(b)).pos());
    }
    let lookup = |level: &BTreeMap<Letter, VarRef>, c: Letter| -> VarRef {
        match level.get(&c) {
            Some(&v) => v,
            None => level[&al.bar(c)].inverse(),
        }
    };
    for (i, alpha) in word.iter().enumerate() {
        let mut next = BTreeMap::new();
        for &b in &positives {
            let image = table.image(alpha, b)?;
            let name = format!("{prefix}{}_{}", i + 1, letter_tag(&al, b));
            let v = match image.letters() {
                [] => slp.push_terminal(Some(&name), None).pos(),
                [c] => {
                    // a chain rule; keep the name by pairing with the empty word
                    let e = slp.empty_var();
                    slp.push_pair(Some(&name), lookup(&level, *c), e)?.pos()
                }
                letters => {
                    let mut acc = lookup(&level, letters[0]);
                    for (t, &c) in letters[1..].iter().enumerate() {
                        let n = if t + 2 == letters.len() { name.clone() } else { format!("{name}_{}", t + 1) };
                        acc = slp.push_pair(Some(&n), acc, lookup(&level, c))?.pos();
                    }
                    acc
                }
            };
            next.insert(b, v);
        }
        level = next;
    }
    Ok(level)
}

/// The SLP for `α₁⋯αₙ(a)` and its root `A[n,a]`.
pub fn schleimer_slp<L: Length>(table: &EndomorphismTable, word: &[String], a: &str) -> Result<(Slp<L>, VarRef)> {
    let letter = table.alphabet.letter(a).ok_or_else(|| Error::UnknownLetter(a.to_string()))?;
    let mut slp = Slp::new(table.alphabet.clone());
    let roots = push_schleimer(&mut slp, table, word, "A")?;
    let root = match roots.get(&letter) {
        Some(&v) => v,
        None => roots[&table.alphabet.bar(letter)].inverse(),
    };
    Ok((slp, root))
}

/// Whether two compositions of endomorphisms agree on every generator of
/// the free group.
pub fn endomorphism_word_problem<L: Length>(table: &EndomorphismTable, w1: &[String], w2: &[String]) -> Result<bool> {
    table.alphabet.require_group()?;
    let mut slp: Slp<L> = Slp::new(table.alphabet.clone());
    let r1 = push_schleimer(&mut slp, table, w1, "A")?;
    let r2 = push_schleimer(&mut slp, table, w2, "B")?;
    for (b, &x) in &r1 {
        let y = r2[b];
        let q = slp.push_pair(None, x, y.inverse())?.pos();
        if !compressed_word_problem(&slp, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}
