//! Lattice sites, rectangular windows of Z^2 and finite lattice domains.

use crate::error::{Error, Result};

/// A site `(n1, n2)` of Z^2.
pub type Site = (i64, i64);

/// A finite rectangle `[x0, x0 + width) x [y0, y0 + height)` of Z^2.
///
/// Sites are linearly indexed row by row: `index = (y - y0) * width + (x - x0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, width: usize, height: usize) -> Self {
        Rect { x0, y0, width, height }
    }

    /// The square `[-l, l]^2`.
    pub fn centered(l: usize) -> Self {
        let l_i = l as i64;
        Rect::new(-l_i, -l_i, 2 * l + 1, 2 * l + 1)
    }

    /// Largest first coordinate inside the rectangle.
    pub fn x1(&self) -> i64 {
        self.x0 + self.width as i64 - 1
    }

    /// Largest second coordinate inside the rectangle.
    pub fn y1(&self) -> i64 {
        self.y0 + self.height as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn contains(&self, n: Site) -> bool {
        n.0 >= self.x0 && n.0 <= self.x1() && n.1 >= self.y0 && n.1 <= self.y1()
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.is_empty()
            || (self.contains((other.x0, other.y0)) && self.contains((other.x1(), other.y1())))
    }

    pub fn index(&self, n: Site) -> Option<usize> {
        if self.contains(n) {
            Some(self.index_unchecked(n))
        } else {
            None
        }
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, n: Site) -> usize {
        (n.1 - self.y0) as usize * self.width + (n.0 - self.x0) as usize
    }

    pub fn site(&self, index: usize) -> Site {
        (
            self.x0 + (index % self.width) as i64,
            self.y0 + (index / self.width) as i64,
        )
    }

    /// Reduce a site into the rectangle by periodic wrapping in both directions.
    pub fn wrap(&self, n: Site) -> Site {
        (
            self.x0 + (n.0 - self.x0).rem_euclid(self.width as i64),
            self.y0 + (n.1 - self.y0).rem_euclid(self.height as i64),
        )
    }

    /// The site at (or just below) the geometric center.
    pub fn center(&self) -> Site {
        (
            self.x0 + (self.width as i64 - 1) / 2,
            self.y0 + (self.height as i64 - 1) / 2,
        )
    }

    /// Grow (or shrink, for negative `by`) the rectangle symmetrically.
    pub fn grown(&self, by: i64) -> Rect {
        let w = (self.width as i64 + 2 * by).max(0) as usize;
        let h = (self.height as i64 + 2 * by).max(0) as usize;
        Rect::new(self.x0 - by, self.y0 - by, w, h)
    }

    pub fn intersect(&self, other: &Rect) -> Rect {
        let x0 = self.x0.max(other.x0);
        let y0 = self.y0.max(other.y0);
        let x1 = self.x1().min(other.x1());
        let y1 = self.y1().min(other.y1());
        if x1 < x0 || y1 < y0 {
            return Rect::new(x0, y0, 0, 0);
        }
        Rect::new(x0, y0, (x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize)
    }

    pub fn sites(self) -> impl Iterator<Item = Site> {
        (0..self.len()).map(move |i| self.site(i))
    }
}

/// Boundary condition of a finite lattice domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    /// Periodic wrap in both directions for the constant flux `2*pi*p/q`.
    MagneticTorus { p: i64, q: i64 },
}

/// A finite window of Z^2 together with its boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeDomain {
    window: Rect,
    boundary: Boundary,
}

impl LatticeDomain {
    pub fn open(window: Rect) -> Self {
        LatticeDomain { window, boundary: Boundary::Open }
    }

    /// The open square `[-l, l]^2`.
    pub fn square(l: usize) -> Self {
        Self::open(Rect::centered(l))
    }

    /// A torus carrying flux `2*pi*p/q` per plaquette. Both sides must be
    /// multiples of `q` so that Landau-gauge phases are periodic.
    pub fn magnetic_torus(window: Rect, p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::Domain(format!("torus denominator q = {q} must be positive")));
        }
        if gcd(p, q) != 1 {
            return Err(Error::Domain(format!("p = {p} and q = {q} are not coprime")));
        }
        let qu = q as usize;
        if window.is_empty() || window.width % qu != 0 || window.height % qu != 0 {
            return Err(Error::Commensurability(format!(
                "torus sides {}x{} must be positive multiples of q = {q}",
                window.width, window.height
            )));
        }
        Ok(LatticeDomain { window, boundary: Boundary::MagneticTorus { p, q } })
    }

    pub fn window(&self) -> Rect {
        self.window
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.boundary, Boundary::MagneticTorus { .. })
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    /// The site `n - u` reached by the hop `u` from `n`, if it lies in the domain.
    #[inline]
    pub fn target(&self, n: Site, u: Site) -> Option<Site> {
        let m = (n.0 - u.0, n.1 - u.1);
        match self.boundary {
            Boundary::Open => self.window.contains(m).then_some(m),
            Boundary::MagneticTorus { .. } => Some(self.window.wrap(m)),
        }
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
