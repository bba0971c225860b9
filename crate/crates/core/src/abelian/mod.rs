//! Finitely presented abelian groups: invariants, membership certificates,
//! pushouts and a line-oriented text format.

pub mod lattice;
pub mod snf;
pub mod sparse;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use indexmap::IndexSet;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
pub use lattice::{BigRow, Lattice};
pub use snf::{smith_normal_form, Matrix, SnfCertificate};
pub use sparse::SparseRow;

/// Generators indexed by label (append-only) and sparse integer relations.
#[derive(Clone, Debug)]
pub struct PresentedGroup<L: Clone + Eq + Hash> {
    generators: IndexSet<L>,
    relations: Vec<SparseRow>,
    seen: HashMap<SparseRow, usize>,
}

impl<L: Clone + Eq + Hash> Default for PresentedGroup<L> {
    fn default() -> Self {
        PresentedGroup { generators: IndexSet::new(), relations: Vec::new(), seen: HashMap::new() }
    }
}

/// Sorts by generator, merges repeated generators and drops zeros.
pub fn normalise_row(mut terms: Vec<(usize, i64)>) -> SparseRow {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: SparseRow = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}

impl<L: Clone + Eq + Hash> PresentedGroup<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn free(labels: impl IntoIterator<Item = L>) -> Self {
        let mut g = Self::new();
        for l in labels {
            g.add_generator(l);
        }
        g
    }

    /// Index of the generator, adding it if new.
    pub fn add_generator(&mut self, label: L) -> usize {
        self.generators.insert_full(label).0
    }

    pub fn generator_index(&self, label: &L) -> Option<usize> {
        self.generators.get_index_of(label)
    }

    pub fn generator(&self, i: usize) -> Option<&L> {
        self.generators.get_index(i)
    }

    pub fn generators(&self) -> &IndexSet<L> {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn relations(&self) -> &[SparseRow] {
        &self.relations
    }

    /// Adds a relation on generator indices. Returns the index of the stored
    /// relation (an existing one for duplicates), or `None` for the empty
    /// relation.
    pub fn add_relation_indices(&mut self, terms: impl IntoIterator<Item = (usize, i64)>) -> Result<Option<usize>> {
        let row = normalise_row(terms.into_iter().collect());
        if let Some(&(i, _)) = row.iter().find(|(i, _)| *i >= self.generators.len()) {
            return Err(Error::IndexMismatch(format!("generator index {i} out of range")));
        }
        if row.is_empty() {
            return Ok(None);
        }
        if let Some(&k) = self.seen.get(&row) {
            return Ok(Some(k));
        }
        let k = self.relations.len();
        self.seen.insert(row.clone(), k);
        self.relations.push(row);
        Ok(Some(k))
    }

    /// Adds a relation on labels, registering unseen generators.
    pub fn add_relation(&mut self, terms: impl IntoIterator<Item = (L, i64)>) -> Option<usize> {
        let idx: Vec<(usize, i64)> = terms.into_iter().map(|(l, c)| (self.add_generator(l), c)).collect();
        self.add_relation_indices(idx).expect("indices are in range")
    }

    /// The coordinate vector of a formal combination of generators, if all
    /// of them are present.
    pub fn vector<'a>(&self, terms: impl IntoIterator<Item = (&'a L, i64)>) -> Option<SparseRow>
    where
        L: 'a,
    {
        let mut v = Vec::new();
        for (l, c) in terms {
            v.push((self.generator_index(l)?, c));
        }
        Some(normalise_row(v))
    }

    pub fn relation_matrix(&self) -> Matrix {
        let n = self.generators.len();
        self.relations
            .iter()
            .map(|r| {
                let mut d = vec![BigInt::zero(); n];
                for &(c, v) in r {
                    d[c] = BigInt::from(v);
                }
                d
            })
            .collect()
    }

    pub fn smith_normal_form(&self) -> SnfCertificate {
        smith_normal_form(&self.relation_matrix(), self.generators.len())
    }

    pub fn invariants(&self) -> GroupInvariants {
        let (diag, cols) = sparse::invariant_diagonal(&self.relations, self.generators.len());
        GroupInvariants::from_diagonal(&diag, cols)
    }

    pub fn oracle(&self) -> MembershipOracle {
        let mut lattice = Lattice::new();
        for (i, r) in self.relations.iter().enumerate() {
            lattice.insert(i, r);
        }
        MembershipOracle { lattice, relations: self.relations.clone() }
    }

    /// Whether `v` lies in the relation span, with the combination of
    /// relations when it does.
    pub fn is_zero_element(&self, v: &[(usize, i64)]) -> Result<Option<BigRow>> {
        if let Some(&(i, _)) = v.iter().find(|(i, _)| *i >= self.generators.len()) {
            return Err(Error::IndexMismatch(format!("generator index {i} out of range")));
        }
        Ok(self.oracle().certify(v))
    }

    pub fn map_labels<M: Clone + Eq + Hash>(&self, f: impl Fn(&L) -> M) -> PresentedGroup<M> {
        PresentedGroup {
            generators: self.generators.iter().map(f).collect(),
            relations: self.relations.clone(),
            seen: self.seen.clone(),
        }
    }
}

/// Cached echelon form for repeated membership queries.
pub struct MembershipOracle {
    lattice: Lattice,
    relations: Vec<SparseRow>,
}

impl MembershipOracle {
    pub fn certify(&self, v: &[(usize, i64)]) -> Option<BigRow> {
        let target: BigRow = normalise_row(v.to_vec()).into_iter().map(|(c, x)| (c, BigInt::from(x))).collect();
        let combo = self.lattice.solve(&target)?;
        debug_assert!(replay(&self.relations, &combo) == target);
        Some(combo)
    }

    pub fn relations(&self) -> &[SparseRow] {
        &self.relations
    }
}

/// `sum_k c_k * relation_k` as a sparse vector.
pub fn replay(relations: &[SparseRow], combo: &BigRow) -> BigRow {
    let mut acc: BigRow = Vec::new();
    for (k, c) in combo {
        let r: BigRow = relations[*k].iter().map(|&(i, v)| (i, BigInt::from(v))).collect();
        acc = lattice::axpy(&acc, c, &r);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupInvariants {
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
    pub rank: usize,
}

impl GroupInvariants {
    pub fn from_diagonal(diag: &[BigInt], cols: usize) -> Self {
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        GroupInvariants {
            torsion: diag.iter().filter(|d| !d.is_zero() && !d.abs().is_one()).map(|d| d.abs()).collect(),
            rank: cols - nonzero,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.rank == 0
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank == 0).then(|| self.torsion.iter().fold(BigInt::one(), |a, b| a * b))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }
}

impl Serialize for GroupInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GroupInvariants", 2)?;
        let torsion: Vec<serde_json::Value> = self
            .torsion
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        st.serialize_field("torsion", &torsion)?;
        st.serialize_field("rank", &self.rank)?;
        st.end()
    }
}

impl fmt::Display for GroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Generator of a pushout `(G + H)/im(-f, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side<A, B> {
    Left(A),
    Right(B),
}

impl<A: fmt::Display, B: fmt::Display> fmt::Display for Side<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left(a) => write!(f, "L:{a}"),
            Side::Right(b) => write!(f, "R:{b}"),
        }
    }
}

pub struct Pushout<A: Clone + Eq + Hash, B: Clone + Eq + Hash> {
    pub group: PresentedGroup<Side<A, B>>,
    /// Image of each generator of `G` in the pushout.
    pub left: Vec<usize>,
    /// Image of each generator of `H` in the pushout.
    pub right: Vec<usize>,
}

/// Pushout of `f: C -> G` and `j: C -> H`, each given by one row per
/// generator of `C` holding the image coordinates.
pub fn pushout<A, B>(
    g: &PresentedGroup<A>,
    h: &PresentedGroup<B>,
    f: &[Vec<i64>],
    j: &[Vec<i64>],
) -> Result<Pushout<A, B>>
where
    A: Clone + Eq + Hash,
    B: Clone + Eq + Hash,
{
    if f.len() != j.len() {
        return Err(Error::IndexMismatch(format!("{} images under f but {} under j", f.len(), j.len())));
    }
    let (ng, nh) = (g.num_generators(), h.num_generators());
    if let Some(r) = f.iter().find(|r| r.len() != ng) {
        return Err(Error::IndexMismatch(format!("f row of length {} for {ng} generators", r.len())));
    }
    if let Some(r) = j.iter().find(|r| r.len() != nh) {
        return Err(Error::IndexMismatch(format!("j row of length {} for {nh} generators", r.len())));
    }
    let mut x = PresentedGroup::new();
    let left: Vec<usize> = g.generators().iter().map(|a| x.add_generator(Side::Left(a.clone()))).collect();
    let right: Vec<usize> = h.generators().iter().map(|b| x.add_generator(Side::Right(b.clone()))).collect();
    for r in g.relations() {
        x.add_relation_indices(r.iter().map(|&(i, c)| (left[i], c)))?;
    }
    for r in h.relations() {
        x.add_relation_indices(r.iter().map(|&(i, c)| (right[i], c)))?;
    }
    for (fr, jr) in f.iter().zip(j) {
        let terms = fr
            .iter()
            .enumerate()
            .map(|(i, &c)| (left[i], -c))
            .chain(jr.iter().enumerate().map(|(i, &c)| (right[i], c)));
        x.add_relation_indices(terms)?;
    }
    Ok(Pushout { group: x, left, right })
}

impl<L: Clone + Eq + Hash + fmt::Display> PresentedGroup<L> {
    /// Text form: a `# generators` section with one label per line, then a
    /// `# relations` section with lines such as `2*a - 1*b`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# generators\n");
        for g in &self.generators {
            out.push_str(&format!("{g}\n"));
        }
        out.push_str("# relations\n");
        for r in &self.relations {
            let mut line = String::new();
            for (k, &(i, c)) in r.iter().enumerate() {
                let label = &self.generators[i];
                if k == 0 {
                    line.push_str(&format!("{c}*{label}"));
                } else if c < 0 {
                    line.push_str(&format!(" - {}*{label}", -c));
                } else {
                    line.push_str(&format!(" + {c}*{label}"));
                }
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Parses the format written by [`PresentedGroup::to_text`].
pub fn from_text(text: &str) -> Result<PresentedGroup<String>> {
    let mut g = PresentedGroup::new();
    let mut section = "";
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            section = match h.trim() {
                "generators" => "generators",
                "relations" => "relations",
                other => return Err(Error::Parse(format!("line {}: unknown section `{other}`", n + 1))),
            };
            continue;
        }
        match section {
            "generators" => {
                if line.contains(char::is_whitespace) {
                    return Err(Error::Parse(format!("line {}: labels cannot contain spaces", n + 1)));
                }
                g.add_generator(line.to_string());
            }
            "relations" => {
                let mut terms = Vec::new();
                let mut sign = 1i64;
                for (k, tok) in line.split(' ').filter(|s| !s.is_empty()).enumerate() {
                    if k % 2 == 1 {
                        sign = match tok {
                            "+" => 1,
                            "-" => -1,
                            _ => return Err(Error::Parse(format!("line {}: expected + or -", n + 1))),
                        };
                        continue;
                    }
                    let (c, label) = tok
                        .split_once('*')
                        .ok_or_else(|| Error::Parse(format!("line {}: expected coef*label", n + 1)))?;
                    let c: i64 = c.parse().map_err(|_| Error::Parse(format!("line {}: bad coefficient", n + 1)))?;
                    let i = g
                        .generator_index(&label.to_string())
                        .ok_or_else(|| Error::IndexMismatch(format!("line {}: unknown generator {label}", n + 1)))?;
                    terms.push((i, sign * c));
                }
                g.add_relation_indices(terms)?;
            }
            _ => return Err(Error::Parse(format!("line {}: content before a section header", n + 1))),
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(gens: &[&str], rels: &[&[(&str, i64)]]) -> PresentedGroup<String> {
        let mut g = PresentedGroup::free(gens.iter().map(|s| s.to_string()));
        for r in rels {
            g.add_relation(r.iter().map(|(l, c)| (l.to_string(), *c)));
        }
        g
    }

    #[test]
    fn invariants_examples() {
        let z2 = group(&["a"], &[&[("a", 2)]]);
        assert_eq!(z2.invariants(), GroupInvariants { torsion: vec![BigInt::from(2)], rank: 0 });
        let g = group(&["a", "b"], &[&[("a", 1), ("b", 1)], &[("a", 1), ("b", -1)]]);
        assert_eq!(g.invariants().torsion, vec![BigInt::from(2)]);
        assert_eq!(g.invariants().rank, 0);
        assert_eq!(group(&["a"], &[]).invariants().rank, 1);
        assert_eq!(g.invariants().to_json(), r#"{"torsion":[2],"rank":0}"#);
    }

    #[test]
    fn membership_examples() {
        let z2 = group(&["a"], &[&[("a", 2)]]);
        assert!(z2.is_zero_element(&[]).unwrap().is_some());
        assert!(z2.is_zero_element(&[(0, 1)]).unwrap().is_none());
        let g = group(&["a", "b"], &[&[("a", 1), ("b", 1)], &[("a", 1), ("b", -1)]]);
        let c = g.is_zero_element(&[(0, 2)]).unwrap().unwrap();
        assert_eq!(replay(g.relations(), &c), vec![(0, BigInt::from(2))]);
        assert!(g.is_zero_element(&[(5, 1)]).is_err());
    }

    #[test]
    fn duplicates_are_merged() {
        let mut g = group(&["a"], &[&[("a", 2)]]);
        assert_eq!(g.add_relation([("a".to_string(), 2)]), Some(0));
        assert_eq!(g.relations().len(), 1);
        assert_eq!(g.add_relation([("a".to_string(), 1), ("a".to_string(), -1)]), None);
    }

    #[test]
    fn pushout_examples() {
        let z = group(&["g"], &[]);
        let w = group(&["h"], &[]);
        let x = pushout(&z, &w, &[vec![2]], &[vec![3]]).unwrap();
        assert_eq!(x.group.invariants(), GroupInvariants { torsion: vec![], rank: 1 });
        let killed = pushout(&z, &w, &[vec![0]], &[vec![1]]).unwrap();
        assert_eq!(killed.group.invariants().rank, 1);
        let direct = pushout(&z, &w, &[], &[]).unwrap();
        assert_eq!(direct.group.invariants().rank, 2);
        assert!(pushout(&z, &w, &[vec![1, 2]], &[vec![1]]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = group(&["{2,3}", "<x+1,x>"], &[&[("{2,3}", 2), ("<x+1,x>", -3)]]);
        let text = g.to_text();
        assert_eq!(text, "# generators\n{2,3}\n<x+1,x>\n# relations\n2*{2,3} - 3*<x+1,x>\n");
        let back = from_text(&text).unwrap();
        assert_eq!(back.relations(), g.relations());
        assert_eq!(back.to_text(), text);
    }
}
