use std::borrow::Cow;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A finite label alphabet; label `i` is written as `symbols[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.is_empty() || symbols.len() > 64 {
            return Err(Error::InvalidParameter(
                "an alphabet needs between 1 and 64 symbols".into(),
            ));
        }
        for (i, c) in symbols.iter().enumerate() {
            if !c.is_ascii_graphic() {
                return Err(Error::InvalidParameter(format!("symbol {c:?} is not printable ASCII")));
            }
            if symbols[..i].contains(c) {
                return Err(Error::InvalidParameter(format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn binary() -> Self {
        Alphabet {
            symbols: vec!['0', '1'],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.symbols.iter().position(|&s| s == c).map(|i| i as u8)
    }

    pub fn symbol(&self, label: u8) -> char {
        self.symbols[label as usize]
    }

    /// The whole label set Ω.
    pub fn all(&self) -> LabelSet {
        LabelSet::from_bits(if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        })
    }

    /// Parses a label subset written with alphabet symbols, e.g. `"12"`.
    pub fn parse_set(&self, s: &str) -> Result<LabelSet> {
        let mut set = LabelSet::empty();
        for c in s.chars().filter(|c| !c.is_whitespace() && *c != ',') {
            let i = self
                .index_of(c)
                .ok_or_else(|| Error::AlphabetMismatch(format!("{c:?} is not in the alphabet")))?;
            set = set.with(i);
        }
        Ok(set)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.symbols {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A subset of an alphabet of at most 64 labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(u64);

impl LabelSet {
    pub fn empty() -> Self {
        LabelSet(0)
    }

    pub fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub fn of(labels: &[u8]) -> Self {
        labels.iter().fold(Self::empty(), |s, &l| s.with(l))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn with(self, label: u8) -> Self {
        LabelSet(self.0 | (1 << label))
    }

    pub fn contains(self, label: u8) -> bool {
        self.0 >> label & 1 == 1
    }

    pub fn union(self, o: Self) -> Self {
        LabelSet(self.0 | o.0)
    }

    pub fn intersect(self, o: Self) -> Self {
        LabelSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        LabelSet(self.0 & !o.0)
    }

    pub fn is_disjoint(self, o: Self) -> bool {
        self.0 & o.0 == 0
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }
}

/// Deterministic infinite label sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// 0, 1, 0, 1, ...
    Alternating,
    /// The word repeated forever.
    Periodic(Vec<u8>),
    /// Uniform labels from a seeded ChaCha8 stream.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Source {
    Memory(Vec<u8>),
    Generated(Generator),
}

/// A label stream from which prefixes of any available length can be read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collective {
    alphabet: Alphabet,
    source: Source,
}

impl Collective {
    pub fn from_labels(alphabet: Alphabet, labels: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= alphabet.len()) {
            return Err(Error::AlphabetMismatch(format!("label {bad} outside the alphabet")));
        }
        Ok(Collective {
            alphabet,
            source: Source::Memory(labels),
        })
    }

    /// Parses label text: alphabet symbols, whitespace ignored, anything else rejected.
    pub fn parse(alphabet: Alphabet, text: &[u8]) -> Result<Self> {
        let mut labels = Vec::with_capacity(text.len());
        for (offset, &b) in text.iter().enumerate() {
            if b.is_ascii_whitespace() {
                continue;
            }
            match alphabet.index_of(b as char).filter(|_| b.is_ascii()) {
                Some(l) => labels.push(l),
                None => {
                    return Err(Error::Parse(format!(
                        "byte 0x{b:02x} at offset {offset} is not in the alphabet {alphabet}"
                    )))
                }
            }
        }
        Ok(Collective {
            alphabet,
            source: Source::Memory(labels),
        })
    }

    pub fn from_file(alphabet: Alphabet, path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(alphabet, &bytes)
    }

    pub fn generated(alphabet: Alphabet, generator: Generator) -> Result<Self> {
        match &generator {
            Generator::Alternating if alphabet.len() < 2 => {
                return Err(Error::AlphabetMismatch(
                    "alternating source needs two labels".into(),
                ))
            }
            Generator::Periodic(w) if w.is_empty() => {
                return Err(Error::InvalidParameter("empty periodic word".into()))
            }
            Generator::Periodic(w) => {
                if w.iter().any(|&l| l as usize >= alphabet.len()) {
                    return Err(Error::AlphabetMismatch("periodic word outside the alphabet".into()));
                }
            }
            _ => {}
        }
        Ok(Collective {
            alphabet,
            source: Source::Generated(generator),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Length of the available data; `None` for unbounded generators.
    pub fn available(&self) -> Option<usize> {
        match &self.source {
            Source::Memory(v) => Some(v.len()),
            Source::Generated(_) => None,
        }
    }

    pub fn prefix(&self, n: usize) -> Result<Cow<'_, [u8]>> {
        match &self.source {
            Source::Memory(v) if v.len() >= n => Ok(Cow::Borrowed(&v[..n])),
            Source::Memory(v) => Err(Error::InsufficientData {
                needed: n,
                available: v.len(),
            }),
            Source::Generated(g) => Ok(Cow::Owned(generate(g, self.alphabet.len(), n))),
        }
    }

    /// n(A, N): occurrences of labels from `set` among the first `n` labels.
    pub fn count(&self, set: LabelSet, n: usize) -> Result<u64> {
        Ok(self.prefix(n)?.iter().filter(|&&l| set.contains(l)).count() as u64)
    }

    /// Counts for several events over one pass of the prefix.
    pub fn counts(&self, sets: &[LabelSet], n: usize) -> Result<Vec<u64>> {
        let prefix = self.prefix(n)?;
        let mut out = vec![0u64; sets.len()];
        for &l in prefix.iter() {
            for (o, s) in out.iter_mut().zip(sets) {
                if s.contains(l) {
                    *o += 1;
                }
            }
        }
        Ok(out)
    }
}

fn generate(g: &Generator, alphabet_len: usize, n: usize) -> Vec<u8> {
    match g {
        Generator::Alternating => (0..n).map(|i| (i % 2) as u8).collect(),
        Generator::Periodic(w) => w.iter().copied().cycle().take(n).collect(),
        Generator::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.gen_range(0..alphabet_len) as u8).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_label_files() {
        let c = Collective::parse(Alphabet::binary(), b"0101 10\n11\t0").unwrap();
        assert_eq!(c.prefix(9).unwrap().as_ref(), &[0, 1, 0, 1, 1, 0, 1, 1, 0]);
        assert!(c.prefix(10).is_err());
        let err = Collective::parse(Alphabet::binary(), b"01x1").unwrap_err();
        assert!(err.to_string().contains("offset 2"), "{err}");
        assert!(Collective::parse(Alphabet::binary(), "0\u{e9}".as_bytes()).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = Collective::generated(Alphabet::binary(), Generator::Seeded(7)).unwrap();
        let b = Collective::generated(Alphabet::binary(), Generator::Seeded(7)).unwrap();
        assert_eq!(a.prefix(500).unwrap(), b.prefix(500).unwrap());
        let p = Collective::generated(Alphabet::new("012").unwrap(), Generator::Periodic(vec![0, 1, 2])).unwrap();
        assert_eq!(p.prefix(7).unwrap().as_ref(), &[0, 1, 2, 0, 1, 2, 0]);
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new("").is_err());
        assert!(Alphabet::new("00").is_err());
        let ab = Alphabet::new("HT").unwrap();
        assert_eq!(ab.parse_set("T").unwrap(), LabelSet::of(&[1]));
        assert!(ab.parse_set("X").is_err());
        assert_eq!(ab.all(), LabelSet::of(&[0, 1]));
    }
}
