use std::fmt;

use crate::error::{Error, Result};
use crate::prime::Prime;

/// Digit trie over `{0..q-1}`. A `Split` never has all children `Empty` or all `Full`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Empty,
    Full,
    Split(Vec<Node>),
}

impl Node {
    fn split(children: Vec<Node>) -> Node {
        if children.iter().all(|c| *c == Node::Empty) {
            Node::Empty
        } else if children.iter().all(|c| *c == Node::Full) {
            Node::Full
        } else {
            Node::Split(children)
        }
    }

    fn children(&self, q: usize) -> Vec<Node> {
        match self {
            Node::Split(c) => c.clone(),
            leaf => vec![leaf.clone(); q],
        }
    }

    fn combine(a: &Node, b: &Node, q: usize, op: fn(bool, bool) -> bool) -> Node {
        match (a, b) {
            (Node::Split(_), _) | (_, Node::Split(_)) => {
                let (ca, cb) = (a.children(q), b.children(q));
                Node::split(ca.iter().zip(&cb).map(|(x, y)| Node::combine(x, y, q, op)).collect())
            }
            _ => {
                if op(*a == Node::Full, *b == Node::Full) {
                    Node::Full
                } else {
                    Node::Empty
                }
            }
        }
    }

    fn complement(&self) -> Node {
        match self {
            Node::Empty => Node::Full,
            Node::Full => Node::Empty,
            Node::Split(c) => Node::Split(c.iter().map(Node::complement).collect()),
        }
    }

    fn insert(&self, word: &[u32], q: usize) -> Node {
        match (self, word.split_first()) {
            (Node::Full, _) | (_, None) => Node::Full,
            (node, Some((&d, rest))) => {
                let mut c = node.children(q);
                c[d as usize] = c[d as usize].insert(rest, q);
                Node::split(c)
            }
        }
    }

    fn leaves(&self, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        match self {
            Node::Empty => {}
            Node::Full => out.push(prefix.clone()),
            Node::Split(c) => {
                for (d, child) in c.iter().enumerate() {
                    prefix.push(d as u32);
                    child.leaves(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Split(c) => 1 + c.iter().map(Node::depth).max().unwrap_or(0),
            _ => 0,
        }
    }
}

/// A clopen subset of `Z_q`, i.e. a finite union of cylinders, kept in the
/// unique normal form of maximal cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clopen {
    q: Prime,
    root: Node,
}

pub(crate) fn check_digits(word: &[u32], q: Prime) -> Result<()> {
    match word.iter().find(|&&d| d as u64 >= q.get()) {
        Some(&d) => Err(Error::DigitRange {
            digit: d as u64,
            base: q.get(),
        }),
        None => Ok(()),
    }
}

impl Clopen {
    pub fn empty(q: Prime) -> Self {
        Clopen { q, root: Node::Empty }
    }

    pub fn whole(q: Prime) -> Self {
        Clopen { q, root: Node::Full }
    }

    /// The cylinder of all sequences extending `word`.
    pub fn cylinder(q: Prime, word: &[u32]) -> Result<Self> {
        Self::from_words(q, &[word.to_vec()])
    }

    /// Normal form of a finite union of cylinders.
    pub fn from_words(q: Prime, words: &[Vec<u32>]) -> Result<Self> {
        let qs = q.get() as usize;
        let mut root = Node::Empty;
        for w in words {
            check_digits(w, q)?;
            root = root.insert(w, qs);
        }
        Ok(Clopen { q, root })
    }

    /// Parses `"01;10;111"`; `""` is the empty set and `"*"` the empty word (whole space).
    pub fn parse(text: &str, q: Prime) -> Result<Self> {
        let mut words = Vec::new();
        for w in text.split(';').map(str::trim).filter(|w| !w.is_empty()) {
            if w == "*" {
                words.push(Vec::new());
                continue;
            }
            let word = w
                .chars()
                .map(|c| {
                    c.to_digit(36)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {w:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            words.push(word);
        }
        Self::from_words(q, &words)
    }

    pub fn q(&self) -> Prime {
        self.q
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::AlphabetMismatch(format!(
                "clopen sets over Z_{} and Z_{}",
                self.q, other.q
            )));
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Clopen {
            q: self.q,
            root: Node::combine(&self.root, &other.root, self.q.get() as usize, |a, b| a || b),
        })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Clopen {
            q: self.q,
            root: Node::combine(&self.root, &other.root, self.q.get() as usize, |a, b| a && b),
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Clopen {
            q: self.q,
            root: Node::combine(&self.root, &other.root, self.q.get() as usize, |a, b| a && !b),
        })
    }

    pub fn complement(&self) -> Self {
        Clopen {
            q: self.q,
            root: self.root.complement(),
        }
    }

    /// Already normal; kept for symmetry with [`Clopen::from_words`].
    pub fn normalize(&self) -> Self {
        self.clone()
    }

    pub fn is_empty(&self) -> bool {
        self.root == Node::Empty
    }

    pub fn is_whole(&self) -> bool {
        self.root == Node::Full
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersect(other)?.is_empty())
    }

    /// Maximal cylinders in lexicographic order.
    pub fn words(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        self.root.leaves(&mut Vec::new(), &mut out);
        out
    }

    /// Length of the longest word in the normal form.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Membership of any point with this digit prefix; `None` if the prefix
    /// is too short to decide.
    pub fn contains_prefix(&self, prefix: &[u32]) -> Option<bool> {
        let mut node = &self.root;
        for &d in prefix {
            match node {
                Node::Split(c) => node = c.get(d as usize)?,
                _ => break,
            }
        }
        match node {
            Node::Empty => Some(false),
            Node::Full => Some(true),
            Node::Split(_) => None,
        }
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self
            .words()
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "*".to_string()
                } else {
                    w.iter().map(|&d| std::char::from_digit(d, 36).unwrap_or('?')).collect()
                }
            })
            .collect();
        f.write_str(&words.join(";"))
    }
}
