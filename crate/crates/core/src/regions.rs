//! Regions of the frequency plane `(X, Y) = (1/a1, 1/a2)` cut out by exact
//! rational half-planes, with a two-variable Fourier–Motzkin feasibility
//! test that keeps track of strict inequalities.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::model::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn negate(self) -> Relation {
        match self {
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Gt => Relation::Le,
            Relation::Ge => Relation::Lt,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Lt | Relation::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        Some(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            ">" => Relation::Gt,
            ">=" => Relation::Ge,
            _ => return None,
        })
    }

    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    /// Frequencies of a period pair.
    pub fn from_periods(a1: &Rational, a2: &Rational) -> Self {
        Point::new(a1.recip(), a2.recip())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// `cx·X + cy·Y rel c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LinearConstraint {
    pub cx: Rational,
    pub cy: Rational,
    pub c: Rational,
    pub rel: Relation,
}

impl LinearConstraint {
    pub fn new(cx: Rational, cy: Rational, rel: Relation, c: Rational) -> Self {
        LinearConstraint { cx, cy, c, rel }
    }

    pub fn holds(&self, p: &Point) -> bool {
        let lhs = &self.cx * &p.x + &self.cy * &p.y;
        self.rel.holds(&lhs, &self.c)
    }

    /// The complement half-plane.
    pub fn negate(&self) -> Self {
        LinearConstraint {
            rel: self.rel.negate(),
            ..self.clone()
        }
    }

    fn closure(&self) -> Self {
        let rel = match self.rel {
            Relation::Lt => Relation::Le,
            Relation::Gt => Relation::Ge,
            r => r,
        };
        LinearConstraint {
            rel,
            ..self.clone()
        }
    }

    /// Rewrites into `a·X + b·Y ≺ c` with `≺` one of `<`, `≤`.
    fn as_upper(&self) -> Bound2 {
        let flip = matches!(self.rel, Relation::Gt | Relation::Ge);
        let s = |r: &Rational| if flip { -r } else { r.clone() };
        Bound2 {
            a: s(&self.cx),
            b: s(&self.cy),
            c: s(&self.c),
            strict: self.rel.is_strict(),
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.cx,
            self.cy,
            self.rel.symbol(),
            self.c
        )
    }
}

#[derive(Debug, Clone)]
struct Bound2 {
    a: Rational,
    b: Rational,
    c: Rational,
    strict: bool,
}

/// One endpoint of an interval on a line.
#[derive(Debug, Clone)]
struct End {
    value: Rational,
    strict: bool,
}

#[derive(Debug, Default)]
struct Interval {
    lo: Option<End>,
    hi: Option<End>,
    empty: bool,
}

impl Interval {
    fn raise_lo(&mut self, value: Rational, strict: bool) {
        match &self.lo {
            Some(e) if e.value > value || (e.value == value && (e.strict || !strict)) => {}
            _ => self.lo = Some(End { value, strict }),
        }
    }

    fn lower_hi(&mut self, value: Rational, strict: bool) {
        match &self.hi {
            Some(e) if e.value < value || (e.value == value && (e.strict || !strict)) => {}
            _ => self.hi = Some(End { value, strict }),
        }
    }

    /// Adds `coef·v ≺ rhs`.
    fn add(&mut self, coef: &Rational, rhs: &Rational, strict: bool) {
        match coef.cmp(&Rational::zero()) {
            Ordering::Greater => self.lower_hi(rhs / coef, strict),
            Ordering::Less => self.raise_lo(rhs / coef, strict),
            Ordering::Equal => {
                let ok = if strict {
                    Rational::zero() < *rhs
                } else {
                    Rational::zero() <= *rhs
                };
                if !ok {
                    self.empty = true;
                }
            }
        }
    }

    /// A member of the interval, or `None` when it is empty.
    fn pick(&self) -> Option<Rational> {
        if self.empty {
            return None;
        }
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => match lo.value.cmp(&hi.value) {
                Ordering::Less => Some(lo.value.midpoint(&hi.value)),
                Ordering::Equal if !lo.strict && !hi.strict => Some(lo.value.clone()),
                _ => None,
            },
            (Some(lo), None) => Some(&lo.value + Rational::one()),
            (None, Some(hi)) => Some(&hi.value - Rational::one()),
            (None, None) => Some(Rational::zero()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "witness", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible(Point),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Exact feasibility of a conjunction of constraints over `(X, Y)`.
///
/// `X` is eliminated by pairing every lower bound with every upper bound;
/// the pair's combined bound on `Y` is strict when either side is. A
/// feasible `Y` is then chosen and substituted back to choose `X`, so the
/// returned witness satisfies every constraint, strict ones included.
pub fn fm_feasible(constraints: &[LinearConstraint]) -> Feasibility {
    let rows: Vec<Bound2> = constraints.iter().map(LinearConstraint::as_upper).collect();
    let zero = Rational::zero();

    let mut y_range = Interval::default();
    let (mut lowers, mut uppers) = (Vec::new(), Vec::new());
    for r in &rows {
        match r.a.cmp(&zero) {
            Ordering::Greater => uppers.push(r),
            Ordering::Less => lowers.push(r),
            Ordering::Equal => y_range.add(&r.b, &r.c, r.strict),
        }
    }
    // lower: X ≻ (c1 - b1·Y)/a1, upper: X ≺ (c2 - b2·Y)/a2
    for lo in &lowers {
        for up in &uppers {
            let coef = &up.b / &up.a - &lo.b / &lo.a;
            let rhs = &up.c / &up.a - &lo.c / &lo.a;
            y_range.add(&coef, &rhs, lo.strict || up.strict);
        }
    }
    let Some(y) = y_range.pick() else {
        return Feasibility::Infeasible;
    };

    let mut x_range = Interval::default();
    for r in &rows {
        x_range.add(&r.a, &(&r.c - &r.b * &y), r.strict);
    }
    match x_range.pick() {
        Some(x) => Feasibility::Feasible(Point::new(x, y)),
        None => unreachable!("projection was feasible at Y = {y}"),
    }
}

/// Conjunction of half-planes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    pub name: String,
    pub constraints: Vec<LinearConstraint>,
}

fn row(cx: Rational, cy: Rational, rel: Relation, c: Rational) -> LinearConstraint {
    LinearConstraint::new(cx, cy, rel, c)
}

impl Region {
    pub fn new(name: impl Into<String>, constraints: Vec<LinearConstraint>) -> Self {
        Region {
            name: name.into(),
            constraints,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.constraints.iter().all(|c| c.holds(p))
    }

    /// Frequencies of three-task instances of density exactly 5/6 with
    /// periods in increasing order.
    pub fn j() -> Region {
        use Relation::*;
        let (one, zero) = (Rational::one(), Rational::zero());
        Region::new(
            "J",
            vec![
                row(one.clone(), -&one, Gt, zero),
                row(one.clone(), rat(2, 1), Gt, rat(5, 6)),
                row(one.clone(), one, Lt, rat(5, 6)),
            ],
        )
    }

    /// The region where construction case `i` (1..=7) applies.
    pub fn m(i: usize) -> Region {
        use Relation::*;
        let one = Rational::one;
        let zero = Rational::zero;
        let x = |rel, c| row(one(), zero(), rel, c);
        let y = |rel, c| row(zero(), one(), rel, c);
        let sum = |lo: Rational| {
            [
                row(one(), one(), Ge, rat(5, 6) - lo),
                row(one(), one(), Lt, rat(5, 6)),
            ]
        };
        let name = format!("M{i}");
        let constraints = match i {
            1 => vec![
                row(one(), -one(), Gt, zero()),
                row(one(), rat(2, 1), Gt, rat(5, 6)),
                row(one(), rat(2, 1), Le, one()),
                row(one(), one(), Lt, rat(5, 6)),
            ],
            2 => [x(Le, rat(2, 3)), y(Lt, rat(1, 5))]
                .into_iter()
                .chain(sum(rat(1, 9)))
                .collect(),
            3 => [x(Le, rat(7, 11)), y(Lt, rat(1, 4))]
                .into_iter()
                .chain(sum(rat(1, 11)))
                .collect(),
            4 => [x(Le, rat(7, 12)), y(Lt, rat(1, 3))]
                .into_iter()
                .chain(sum(rat(1, 12)))
                .collect(),
            5 => [x(Lt, rat(1, 2)), y(Le, rat(1, 3))]
                .into_iter()
                .chain(sum(rat(1, 6)))
                .collect(),
            6 => [x(Lt, rat(1, 2)), y(Le, rat(5, 12))]
                .into_iter()
                .chain(sum(rat(1, 12)))
                .collect(),
            7 => [x(Le, rat(5, 12)), y(Le, rat(5, 12))]
                .into_iter()
                .chain(sum(rat(1, 6)))
                .collect(),
            _ => panic!("no region M{i}"),
        };
        Region::new(name, constraints)
    }

    pub fn all_m() -> Vec<Region> {
        (1..=7).map(Region::m).collect()
    }

    /// Intersection with another region.
    pub fn and(&self, other: &Region) -> Region {
        Region::new(
            format!("{}∩{}", self.name, other.name),
            self.constraints
                .iter()
                .chain(&other.constraints)
                .cloned()
                .collect(),
        )
    }

    /// One constraint per line as `cx cy rel c`.
    pub fn dump(&self) -> String {
        self.constraints.iter().map(|c| format!("{c}\n")).collect()
    }

    /// Reads the [`Region::dump`] format back.
    pub fn parse_dump(name: &str, text: &str) -> Result<Region, String> {
        let mut constraints = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [cx, cy, rel, c] = parts[..] else {
                return Err(format!("line {}: expected `cx cy rel c`", n + 1));
            };
            let num = |s: &str| {
                s.parse::<Rational>()
                    .map_err(|e| format!("line {}: {e}", n + 1))
            };
            let rel = Relation::from_symbol(rel)
                .ok_or_else(|| format!("line {}: bad relation `{rel}`", n + 1))?;
            constraints.push(LinearConstraint::new(num(cx)?, num(cy)?, rel, num(c)?));
        }
        Ok(Region::new(name, constraints))
    }

    /// Corners of the closure of the region clipped to the unit square, in
    /// counter-clockwise order.
    pub fn vertices(&self) -> Vec<Point> {
        use Relation::*;
        let (one, zero) = (Rational::one(), Rational::zero());
        let mut lines: Vec<LinearConstraint> =
            self.constraints.iter().map(|c| c.closure()).collect();
        lines.extend([
            row(one.clone(), zero.clone(), Ge, zero.clone()),
            row(one.clone(), zero.clone(), Le, one.clone()),
            row(zero.clone(), one.clone(), Ge, zero.clone()),
            row(zero.clone(), one.clone(), Le, one.clone()),
        ]);
        let mut points: Vec<Point> = Vec::new();
        for (i, l1) in lines.iter().enumerate() {
            for l2 in &lines[i + 1..] {
                let det = &l1.cx * &l2.cy - &l1.cy * &l2.cx;
                if det.is_zero() {
                    continue;
                }
                let x = (&l1.c * &l2.cy - &l1.cy * &l2.c) / &det;
                let y = (&l1.cx * &l2.c - &l1.c * &l2.cx) / &det;
                let p = Point::new(x, y);
                if lines.iter().all(|l| l.holds(&p)) && !points.contains(&p) {
                    points.push(p);
                }
            }
        }
        sort_ccw(&mut points);
        points
    }
}

fn sort_ccw(points: &mut [Point]) {
    if points.len() < 3 {
        points.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
        return;
    }
    let n = Rational::integer(points.len() as i64);
    let cx = points.iter().map(|p| &p.x).sum::<Rational>() / &n;
    let cy = points.iter().map(|p| &p.y).sum::<Rational>() / &n;
    let zero = Rational::zero();
    let upper = |p: &Point| {
        let (dx, dy) = (&p.x - &cx, &p.y - &cy);
        dy > zero || (dy == zero && dx > zero)
    };
    points.sort_by(|a, b| {
        upper(b).cmp(&upper(a)).then_with(|| {
            let cross = (&a.x - &cx) * (&b.y - &cy) - (&a.y - &cy) * (&b.x - &cx);
            zero.cmp(&cross)
        })
    });
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "witness", rename_all = "snake_case")]
pub enum CoverResult {
    Covered,
    Witness(Point),
}

impl CoverResult {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverResult::Covered)
    }
}

fn search_uncovered(acc: &mut Vec<LinearConstraint>, covers: &[Region]) -> Option<Point> {
    let Some((first, rest)) = covers.split_first() else {
        return match fm_feasible(acc) {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible => None,
        };
    };
    for c in &first.constraints {
        acc.push(c.negate());
        let found = if fm_feasible(acc).is_feasible() {
            search_uncovered(acc, rest)
        } else {
            None
        };
        acc.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Decides whether `target ⊆ covers[0] ∪ … ∪ covers[k-1]`.
///
/// A point escapes every cover exactly when it violates one constraint of
/// each, so the complement of the union is the disjunction over all choices
/// of one negated constraint per cover. Each choice is intersected with the
/// target and tested with [`fm_feasible`]; partial choices that are already
/// infeasible are pruned. Returns the first point found outside the union.
pub fn cover_check(target: &Region, covers: &[Region]) -> CoverResult {
    let witness = match covers.split_first() {
        None => match fm_feasible(&target.constraints) {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible => None,
        },
        Some((first, rest)) => first_branch_witness(target, first, rest),
    };
    match witness {
        None => CoverResult::Covered,
        Some(p) => {
            assert!(target.contains(&p), "witness {p} outside {}", target.name);
            assert!(
                covers.iter().all(|r| !r.contains(&p)),
                "witness {p} inside a cover"
            );
            CoverResult::Witness(p)
        }
    }
}

fn branch(target: &Region, negated: &LinearConstraint, rest: &[Region]) -> Option<Point> {
    let mut acc = target.constraints.clone();
    acc.push(negated.clone());
    if !fm_feasible(&acc).is_feasible() {
        return None;
    }
    search_uncovered(&mut acc, rest)
}

#[cfg(feature = "parallel")]
fn first_branch_witness(target: &Region, first: &Region, rest: &[Region]) -> Option<Point> {
    use rayon::prelude::*;
    let found: Vec<Option<Point>> = first
        .constraints
        .par_iter()
        .map(|c| branch(target, &c.negate(), rest))
        .collect();
    found.into_iter().flatten().next()
}

#[cfg(not(feature = "parallel"))]
fn first_branch_witness(target: &Region, first: &Region, rest: &[Region]) -> Option<Point> {
    first
        .constraints
        .iter()
        .find_map(|c| branch(target, &c.negate(), rest))
}
