//! Genus-0 spectral curves: curve files, validation, branch points and deck
//! transformations.

mod parse;
pub(crate) mod roots;

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::algebra::{Field, FieldSpec, Point, Polynomial, RationalFunction, Ring, Scalar, Series, EXACT};
use crate::error::{Error, Result};

pub use parse::{parse_expr, parse_expression, ExprError};
pub use roots::roots_in_field;

pub type Rf = RationalFunction<Scalar>;

/// Unvalidated curve data as declared by the user.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSpec {
    pub field: FieldSpec,
    pub x: Rf,
    pub y: Rf,
    /// Sheet maps σ_0 = z, σ_1, ... with x∘σ_i = x.
    pub sheets: Vec<Rf>,
    pub basepoint: Scalar,
    pub cauchy_type: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    field: toml::Spanned<String>,
    x: toml::Spanned<String>,
    y: toml::Spanned<String>,
    sheets: Vec<toml::Spanned<String>>,
    basepoint: toml::Spanned<String>,
    #[serde(default)]
    cauchy_type: bool,
}

fn line_col(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

fn spanned_expr(text: &str, s: &toml::Spanned<String>) -> Result<Rf> {
    parse_expr(s.get_ref()).map_err(|e| {
        // The span covers the opening quote; expression offsets start after it.
        let (line, col) = line_col(text, s.span().start);
        Error::Parse { line, column: col + 1 + e.offset, message: e.message }
    })
}

impl CurveSpec {
    /// Parse the `key = value` curve file format.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawCurve = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
            Error::Parse { line, column, message: e.message().trim().to_string() }
        })?;
        let field = match raw.field.get_ref().replace(' ', "").as_str() {
            "Q" => FieldSpec::Rational,
            "Q(w);w^2+w+1=0" => FieldSpec::Eisenstein,
            other => {
                let (line, column) = line_col(text, raw.field.span().start);
                return Err(Error::Parse { line, column, message: format!("unknown field `{other}`") });
            }
        };
        let x = spanned_expr(text, &raw.x)?;
        let y = spanned_expr(text, &raw.y)?;
        let sheets = raw.sheets.iter().map(|s| spanned_expr(text, s)).collect::<Result<Vec<_>>>()?;
        let o = spanned_expr(text, &raw.basepoint)?;
        let basepoint = o.as_constant().ok_or_else(|| {
            let (line, column) = line_col(text, raw.basepoint.span().start);
            Error::Parse { line, column, message: "basepoint must be a constant".into() }
        })?;
        let spec = CurveSpec { field, x, y, sheets, basepoint, cauchy_type: raw.cauchy_type };
        spec.check_field()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    fn check_field(&self) -> Result<()> {
        let in_field = |f: &Rf| {
            f.num().coeffs().iter().chain(f.den().coeffs()).all(|c| self.field.contains(c))
        };
        let mut named: Vec<(String, &Rf)> = vec![("x".into(), &self.x), ("y".into(), &self.y)];
        named.extend(self.sheets.iter().enumerate().map(|(i, s)| (format!("sheets[{i}]"), s)));
        for (name, f) in named {
            if !in_field(f) {
                return Err(Error::Field(format!("{name} uses w but the curve is declared over Q")));
            }
        }
        if !self.field.contains(&self.basepoint) {
            return Err(Error::Field("basepoint uses w but the curve is declared over Q".into()));
        }
        Ok(())
    }

    /// Same curve with another basepoint.
    pub fn with_basepoint(&self, o: Scalar) -> Self {
        CurveSpec { basepoint: o, ..self.clone() }
    }

    /// Same curve with `y` replaced by `λ·y`.
    pub fn with_scaled_y(&self, lambda: &Scalar) -> Self {
        CurveSpec { y: self.y.scale(lambda), ..self.clone() }
    }

    /// Canonical text form used for fingerprints.
    pub fn canonical(&self) -> String {
        let sheets: Vec<String> = self.sheets.iter().map(|s| format!("\"{}\"", s.render("z"))).collect();
        format!(
            "field = \"{}\"\nx = \"{}\"\ny = \"{}\"\nsheets = [{}]\nbasepoint = \"{}\"\ncauchy_type = {}\n",
            self.field.canonical(),
            self.x.render("z"),
            self.y.render("z"),
            sheets.join(", "),
            self.basepoint,
            self.cauchy_type
        )
    }
}

/// A deck transformation ϑ^j near a branch point.
#[derive(Clone, Debug, PartialEq)]
pub enum DeckMap {
    /// A declared sheet map fixing the branch point.
    Exact(Rf),
    /// No global map available; a series germ is built on demand.
    Germ,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchPoint {
    pub location: Scalar,
    /// Order of vanishing of dx (1 or 2).
    pub nb: usize,
    pub x_value: Scalar,
    /// ϑ^1..ϑ^{nb}.
    pub deck: Vec<DeckMap>,
    /// Coefficient of (z − β)^{-2} in y, for double branch points.
    pub y_minus2: Option<Scalar>,
    /// Leading coefficient of x − x(β) in (z − β).
    pub x_lead: Scalar,
}

impl BranchPoint {
    /// Multiplier of ϑ^j: (−1)^j or θ^j.
    pub fn multiplier(&self, j: usize) -> Scalar {
        match self.nb {
            1 => Scalar::int(if j % 2 == 0 { 1 } else { -1 }),
            _ => Scalar::theta_pow(j as i64),
        }
    }
}

/// ϑ^j(α + s) − α as a series in s, with the exact map when available.
#[derive(Clone, Debug)]
pub struct DeckGerm {
    pub exact: Option<Rf>,
    pub series: Series<Scalar>,
}

/// Validated genus-0 spectral curve.
#[derive(Clone, Debug)]
pub struct SpectralCurve {
    spec: CurveSpec,
    dx: Rf,
    ydx: Rf,
    degree: usize,
    branch_points: Vec<BranchPoint>,
}

fn map_degree(f: &Rf) -> usize {
    f.num().degree().unwrap_or(0).max(f.den().degree().unwrap_or(0))
}

impl SpectralCurve {
    pub fn load(spec: CurveSpec) -> Result<Self> {
        spec.check_field()?;
        let z = Rf::var();
        if spec.x.as_constant().is_some() {
            return Err(Error::Validation("x must be non-constant".into()));
        }
        if spec.sheets.first() != Some(&z) {
            return Err(Error::Validation("sheets[0] must be the identity map z".into()));
        }
        for (i, s) in spec.sheets.iter().enumerate() {
            if spec.x.compose(s) != spec.x {
                return Err(Error::Validation(format!("sheet map sheets[{i}] = {} does not preserve x", s.render("z"))));
            }
            if spec.sheets[..i].contains(s) {
                return Err(Error::Validation(format!("sheet map sheets[{i}] repeats an earlier sheet")));
            }
        }
        let degree = map_degree(&spec.x);
        if spec.sheets.len() > degree {
            return Err(Error::Validation(format!("{} sheets declared but x has degree {degree}", spec.sheets.len())));
        }
        let dx = spec.x.derivative();
        let ydx = spec.y.times(&dx);
        let mut curve = SpectralCurve { spec, dx, ydx, degree, branch_points: Vec::new() };
        curve.branch_points = curve.find_branch_points()?;
        curve.validate_branch_data()?;
        curve.validate_basepoint()?;
        Ok(curve)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::load(CurveSpec::from_path(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::load(CurveSpec::parse(text)?)
    }

    fn find_branch_points(&self) -> Result<Vec<BranchPoint>> {
        let mut out = Vec::new();
        if self.dx.num().is_constant() {
            return Ok(out);
        }
        for (a, m) in roots_in_field(self.dx.num())? {
            if m > 2 {
                return Err(Error::UnsupportedBranching { order: m, location: a.to_string() });
            }
            let x_value = self.spec.x.eval(&a)?;
            let xs = self.spec.x.expand_at(&Point::Finite(a.clone()), m as i64 + 2)?;
            let x_lead = xs.coeff(m as i64 + 1)?;
            let mut deck = Vec::new();
            let proto = BranchPoint { location: a.clone(), nb: m, x_value, deck: Vec::new(), y_minus2: None, x_lead };
            for j in 1..=m {
                let c = proto.multiplier(j);
                let found = self.spec.sheets.iter().find(|s| {
                    s.eval(&a).is_ok_and(|v| v == a) && s.derivative().eval(&a).is_ok_and(|d| d == c)
                });
                deck.push(match found {
                    Some(s) => DeckMap::Exact(s.clone()),
                    None => DeckMap::Germ,
                });
            }
            let y_minus2 = if m == 2 {
                let v = self.spec.y.valuation_at(&a);
                if v != -2 {
                    return Err(Error::Validation(format!(
                        "double branch point at z = {a} needs y to have a double pole there (found order {v})"
                    )));
                }
                Some(self.spec.y.expand_at(&Point::Finite(a.clone()), -1)?.coeff(-2)?)
            } else {
                None
            };
            out.push(BranchPoint { deck, y_minus2, ..proto });
        }
        Ok(out)
    }

    fn validate_branch_data(&self) -> Result<()> {
        for (i, a) in self.branch_points.iter().enumerate() {
            for b in &self.branch_points[..i] {
                if a.x_value == b.x_value {
                    return Err(Error::Validation(format!(
                        "branch points z = {} and z = {} share the branch value x = {}",
                        b.location, a.location, a.x_value
                    )));
                }
            }
            if a.nb == 1 && self.spec.y.valuation_at(&a.location) >= 0 {
                let dy = self.spec.y.derivative();
                if dy.eval(&a.location)?.is_zero() {
                    return Err(Error::Validation(format!("dx and dy vanish together at z = {}", a.location)));
                }
            }
        }
        let needs_trace = self.spec.cauchy_type || self.branch_points.iter().any(|b| b.nb == 2);
        if needs_trace {
            if !self.sheets_complete() {
                return Err(Error::Validation(format!(
                    "trace-free check needs all {} sheets declared, found {}",
                    self.degree,
                    self.spec.sheets.len()
                )));
            }
            if self.spec.cauchy_type && self.degree != 3 {
                return Err(Error::Validation("cauchy_type curves must be 3-sheeted".into()));
            }
            let trace = self.spec.sheets.iter().fold(Rf::zero(), |acc, s| acc.plus(&self.spec.y.compose(s)));
            if !trace.is_zero() {
                return Err(Error::Validation(format!(
                    "trace-free condition fails: sum of y over the sheets is {}",
                    trace.render("z")
                )));
            }
        }
        Ok(())
    }

    fn validate_basepoint(&self) -> Result<()> {
        let o = &self.spec.basepoint;
        let x_o = self.spec.x.eval(o).map_err(|_| Error::Basepoint(format!("x has a pole at the basepoint {o}")))?;
        self.spec.y.eval(o).map_err(|_| Error::Basepoint(format!("y has a pole at the basepoint {o}")))?;
        for b in &self.branch_points {
            if b.location == *o {
                return Err(Error::Basepoint(format!("basepoint {o} is a branch point")));
            }
            if b.x_value == x_o {
                return Err(Error::Basepoint(format!("basepoint {o} lies over the branch value x = {}", b.x_value)));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn field(&self) -> FieldSpec {
        self.spec.field
    }

    pub fn x(&self) -> &Rf {
        &self.spec.x
    }

    pub fn y(&self) -> &Rf {
        &self.spec.y
    }

    /// dx/dz.
    pub fn dx(&self) -> &Rf {
        &self.dx
    }

    /// y·dx/dz.
    pub fn ydx(&self) -> &Rf {
        &self.ydx
    }

    pub fn basepoint(&self) -> &Scalar {
        &self.spec.basepoint
    }

    pub fn sheets(&self) -> &[Rf] {
        &self.spec.sheets
    }

    /// Degree of x as a map, i.e. the number of sheets of the full cover.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sheets_complete(&self) -> bool {
        self.spec.sheets.len() == self.degree
    }

    pub fn branch_points(&self) -> &[BranchPoint] {
        &self.branch_points
    }

    /// {σ_i(p)} in declared sheet order.
    pub fn fiber(&self, p: &Scalar) -> Result<Vec<Scalar>> {
        self.spec.sheets.iter().map(|s| s.eval(p)).collect()
    }

    /// The sheet maps themselves, i.e. the fiber of a symbolic point.
    pub fn fiber_symbolic(&self) -> &[Rf] {
        &self.spec.sheets
    }

    /// ϑ^j at branch point `bp`, as `ϑ^j(α + s) − α` known below `order`.
    pub fn deck_germ(&self, bp: usize, j: usize, order: i64) -> Result<DeckGerm> {
        let b = self.branch_points.get(bp).ok_or_else(|| Error::Usage(format!("no branch point #{bp}")))?;
        if j == 0 || j > b.nb {
            return Err(Error::Usage(format!("deck index {j} out of range 1..={}", b.nb)));
        }
        let alpha = &b.location;
        match &b.deck[j - 1] {
            DeckMap::Exact(s) => {
                let series = if s.is_polynomial() {
                    let shifted = s.num().compose(&Polynomial::new(vec![alpha.clone(), Scalar::one()]));
                    let lead_inv = s.den().coeff(0).inverse().expect("monic");
                    Series::from_poly(&shifted.mul_coeff(&lead_inv), EXACT).minus(&Series::constant(alpha.clone()))
                } else {
                    s.expand_at(&Point::Finite(alpha.clone()), order)?.minus(&Series::constant(alpha.clone()))
                };
                Ok(DeckGerm { exact: Some(s.clone()), series })
            }
            DeckMap::Germ => Ok(DeckGerm { exact: None, series: self.germ_series(b, j, order)? }),
        }
    }

    fn germ_series(&self, b: &BranchPoint, j: usize, order: i64) -> Result<Series<Scalar>> {
        let n = b.nb as i64;
        let xs = self.spec.x.expand_at(&Point::Finite(b.location.clone()), order + n)?;
        let big_x = xs.minus(&Series::constant(b.x_value.clone()));
        let lead_inv = b.x_lead.inverse().ok_or(Error::DivisionByZero)?;
        // φ = s·(X/(x_{n+1}s^{n+1}))^{1/(n+1)} straightens x − x(α) = x_{n+1}φ^{n+1}.
        let ratio = big_x.shift(-(n + 1)).scale(&lead_inv);
        let phi = ratio.pow_ratio(1, n + 1)?.shift(1);
        let phi_inv = phi.reverse()?;
        phi_inv.compose(&phi.scale(&b.multiplier(j)))
    }
}

impl fmt::Display for BranchPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z = {}, n_b = {}, x = {}", self.location, self.nb, self.x_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EISENSTEIN: &str = r#"
field = "Q(w); w^2+w+1=0"
x = "z^3"
y = "z^-2 + (1/2)*z"
sheets = ["z", "w*z", "w^2*z"]
basepoint = "1"
"#;

    #[test]
    fn eisenstein_branch_data() {
        let c = SpectralCurve::parse(EISENSTEIN).unwrap();
        let bp = &c.branch_points()[0];
        assert_eq!(bp.nb, 2);
        assert_eq!(bp.y_minus2, Some(Scalar::int(1)));
        assert!(matches!(bp.deck[1], DeckMap::Exact(_)));
        let g = c.deck_germ(0, 2, 5).unwrap();
        assert_eq!(g.series, Series::monomial(Scalar::theta_pow(2), 1));
    }

    #[test]
    fn trace_free_violation() {
        let text = EISENSTEIN.replace("z^-2 + (1/2)*z", "z^-2 + z^3");
        assert!(matches!(SpectralCurve::parse(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn parse_error_position() {
        let text = EISENSTEIN.replace("z^3\"", "z^^3\"");
        match CurveSpec::parse(&text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
