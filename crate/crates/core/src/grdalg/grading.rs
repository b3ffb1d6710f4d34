use std::fmt::{Debug, Display};
use std::hash::Hash;

/// Degree type of a graded object: `i32` for dg objects, [`Bideg`] for dgg objects.
///
/// The first component is the cohomological degree; it drives Koszul signs,
/// the differential step and truncation windows.
pub trait Grading: Copy + Ord + Hash + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    /// Degree of the differential.
    fn step() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn cohom(self) -> i32;
    /// Applies the shift `{n}`: `({n}M)^i = M^{i+n}` in the first component.
    fn shifted(self, n: i32) -> Self;
}

impl Grading for i32 {
    fn zero() -> Self {
        0
    }
    fn step() -> Self {
        1
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn cohom(self) -> i32 {
        self
    }
    fn shifted(self, n: i32) -> Self {
        self - n
    }
}

/// Bidegree `(i, j)`; the differential has bidegree `(1, 0)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Bideg {
    pub i: i32,
    pub j: i32,
}

impl Bideg {
    pub const fn new(i: i32, j: i32) -> Self {
        Bideg { i, j }
    }
}

impl Display for Bideg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl Grading for Bideg {
    fn zero() -> Self {
        Bideg::new(0, 0)
    }
    fn step() -> Self {
        Bideg::new(1, 0)
    }
    fn add(self, o: Self) -> Self {
        Bideg::new(self.i + o.i, self.j + o.j)
    }
    fn sub(self, o: Self) -> Self {
        Bideg::new(self.i - o.i, self.j - o.j)
    }
    fn cohom(self) -> i32 {
        self.i
    }
    fn shifted(self, n: i32) -> Self {
        Bideg::new(self.i - n, self.j)
    }
}
