//! Ordered finite carriers and their elements.
//!
//! Sums are occurrence-tagged: concatenating the summands' base sequences and
//! tagging the c-th repeat of an element with `@c`. Disjoint summands keep
//! their plain names, and sums are strictly associative with unit `∅`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Atom(Arc<str>),
    Pair(Arc<(Element, Element)>),
    Tagged(u32, Arc<Element>),
}

impl Element {
    pub fn atom(name: &str) -> Self {
        Element::Atom(Arc::from(name))
    }

    pub fn pair(left: Element, right: Element) -> Self {
        Element::Pair(Arc::new((left, right)))
    }

    pub fn tagged(tag: u32, inner: Element) -> Self {
        if tag == 0 {
            inner
        } else {
            Element::Tagged(tag, Arc::new(inner))
        }
    }

    pub fn as_pair(&self) -> Option<(&Element, &Element)> {
        match self {
            Element::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Element::Atom(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Atom(a) => f.write_str(a),
            Element::Pair(p) => write!(f, "({},{})", p.0, p.1),
            Element::Tagged(t, e) => write!(f, "{e}@{t}"),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("duplicate element `{0}`")]
    Duplicate(Element),
    #[error("element `{element}` is not in {set}")]
    Missing { element: Element, set: String },
}

/// An ordered set of distinct elements.
#[derive(Clone)]
pub struct FiniteSet {
    base: Vec<Element>,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
}

/// Carriers are shared, never mutated.
pub type Carrier = Arc<FiniteSet>;

impl FiniteSet {
    pub fn new(elements: impl IntoIterator<Item = Element>) -> Result<Carrier, SetError> {
        let elements: Vec<Element> = elements.into_iter().collect();
        Self::build(elements.clone(), elements)
    }

    fn build(base: Vec<Element>, elements: Vec<Element>) -> Result<Carrier, SetError> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(SetError::Duplicate(e.clone()));
            }
        }
        Ok(Arc::new(FiniteSet { base, elements, index }))
    }

    pub fn atoms<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Carrier, SetError> {
        Self::new(names.into_iter().map(|n| Element::atom(n.as_ref())))
    }

    pub fn empty() -> Carrier {
        Arc::new(FiniteSet { base: Vec::new(), elements: Vec::new(), index: HashMap::new() })
    }

    /// Ordered disjoint union; left positions first.
    pub fn sum(left: &FiniteSet, right: &FiniteSet) -> Result<Carrier, SetError> {
        let base: Vec<Element> = left.base.iter().chain(&right.base).cloned().collect();
        let mut seen: HashMap<&Element, u32> = HashMap::new();
        let elements = base
            .iter()
            .map(|e| {
                let count = seen.entry(e).or_insert(0);
                let tagged = Element::tagged(*count, e.clone());
                *count += 1;
                tagged
            })
            .collect();
        Self::build(base, elements)
    }

    /// All pairs, left-major.
    pub fn product(left: &FiniteSet, right: &FiniteSet) -> Carrier {
        let pairs = left
            .elements
            .iter()
            .flat_map(|l| right.elements.iter().map(move |r| Element::pair(l.clone(), r.clone())));
        Self::new(pairs).expect("pairs of distinct elements are distinct")
    }

    /// Elements of `left` not in `right`, in `left` order.
    pub fn difference(left: &FiniteSet, right: &FiniteSet) -> Carrier {
        Self::new(left.elements.iter().filter(|e| !right.contains(e)).cloned())
            .expect("a subsequence of distinct elements is distinct")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn position(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn require(&self, e: &Element) -> Result<usize, SetError> {
        self.position(e)
            .ok_or_else(|| SetError::Missing { element: e.clone(), set: self.to_string() })
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    /// Same elements, possibly in another order.
    pub fn same_elements(&self, other: &FiniteSet) -> bool {
        self.len() == other.len() && self.elements.iter().all(|e| other.contains(e))
    }

    /// `perm[i]` is the position in `self` of `target`'s i-th element.
    pub fn permutation_to(&self, target: &FiniteSet) -> Option<Vec<usize>> {
        if self.len() != target.len() {
            return None;
        }
        target.elements.iter().map(|e| self.position(e)).collect()
    }
}

impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for FiniteSet {}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
