//! Check outcomes: pass/fail reports with violation witnesses.

/// A concrete violation point: the inequality's two arguments and the two
/// sides as evaluated there. For single-argument checks (psi class,
/// invariance) `y` doubles as the secondary sample or repeats `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Witness {
    pub fn new(x: f64, y: f64, lhs: f64, rhs: f64) -> Self {
        Witness {
            x,
            y,
            lhs,
            rhs,
            margin: lhs - rhs,
        }
    }
}

/// The contractive-type inequalities the checker knows about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InequalityKind {
    /// d(Tx,Ty) <= k d(x,y) with 0 <= k < 1.
    Contraction { k: f64 },
    /// d(Tx,Ty) <= d(x,y) - psi(d(x,y)).
    WeaklyContractive,
    /// d(Tx,Ty) <= d(fx,fy) - psi(d(fx,fy)).
    WeaklyContractiveWrt,
    /// d(gx,Ty) <= d(fx,fy) - psi(d(fx,fy)).
    AzamShakeel,
    /// d(Tx,Ty) <= min of both cross-pair bounds.
    FgMin,
    /// d(Tx,Ty) <= max of both cross-pair bounds.
    FgMax,
    /// d(T1 x, Tj y) <= the min bound, for every member Tj of a family.
    FamilyMin,
}

impl std::fmt::Display for InequalityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InequalityKind::Contraction { k } => write!(f, "contraction(k={k})"),
            InequalityKind::WeaklyContractive => write!(f, "weakly-contractive"),
            InequalityKind::WeaklyContractiveWrt => write!(f, "weakly-contractive-wrt"),
            InequalityKind::AzamShakeel => write!(f, "azam-shakeel"),
            InequalityKind::FgMin => write!(f, "fg-min"),
            InequalityKind::FgMax => write!(f, "fg-max"),
            InequalityKind::FamilyMin => write!(f, "family-min"),
        }
    }
}

/// What a report is about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    Inequality(InequalityKind),
    PsiClass,
    WeakCompatibility,
    Invariance,
    StrictGap,
}

impl std::fmt::Display for CheckKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckKind::Inequality(k) => write!(f, "{k}"),
            CheckKind::PsiClass => write!(f, "psi-class"),
            CheckKind::WeakCompatibility => write!(f, "weak-compatibility"),
            CheckKind::Invariance => write!(f, "invariance"),
            CheckKind::StrictGap => write!(f, "strict-gap"),
        }
    }
}

/// Outcome of a grid verification. A pass is a grid certificate, not a
/// proof; `pairs_checked` and `grid_points` make the claim reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub passed: bool,
    pub witness: Option<Witness>,
    pub pairs_checked: usize,
    pub max_margin: f64,
    pub grid_points: usize,
    pub tol: f64,
    /// Points skipped because a composite left the domain (weak compatibility).
    pub skipped: Vec<f64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(kind: CheckKind, tol: f64) -> Self {
        CheckReport {
            kind,
            passed: false,
            witness: None,
            pairs_checked: 0,
            max_margin: f64::NEG_INFINITY,
            grid_points: 0,
            tol,
            skipped: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub(crate) fn fail(mut self, witness: Witness) -> Self {
        self.passed = false;
        self.max_margin = witness.margin;
        self.witness = Some(witness);
        self
    }
}
