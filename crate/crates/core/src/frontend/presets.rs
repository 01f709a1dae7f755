//! Named instances of the scheme obtained by fixing some of its parameters.

use std::fmt;

use super::parser::{SourceDiagnostic, SourceProgram};
use crate::cdom::ConstraintDomain;
use crate::qualdom::{QualDomain, Threshold};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Sqclp,
    Qclp,
    Sqlp,
    Sclp,
    Qlp,
    Slp,
    Clp,
    Lp,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Sqclp,
        Preset::Qclp,
        Preset::Sqlp,
        Preset::Sclp,
        Preset::Qlp,
        Preset::Slp,
        Preset::Clp,
        Preset::Lp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sqclp => "SQCLP",
            Preset::Qclp => "QCLP",
            Preset::Sqlp => "SQLP",
            Preset::Sclp => "SCLP",
            Preset::Qlp => "QLP",
            Preset::Slp => "SLP",
            Preset::Clp => "CLP",
            Preset::Lp => "LP",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    /// Whether the proximity relation is fixed to the identity.
    pub fn identity_proximity(self) -> bool {
        matches!(self, Preset::Qclp | Preset::Qlp | Preset::Clp | Preset::Lp)
    }

    pub fn fixed_qdom(self) -> Option<QualDomain> {
        match self {
            Preset::Sclp | Preset::Clp | Preset::Lp => Some(QualDomain::Bool),
            Preset::Slp => Some(QualDomain::Uncertainty),
            _ => None,
        }
    }

    pub fn fixed_cdom(self) -> Option<ConstraintDomain> {
        match self {
            Preset::Sqlp | Preset::Qlp | Preset::Slp => Some(ConstraintDomain::Real),
            Preset::Lp => Some(ConstraintDomain::Herbrand),
            _ => None,
        }
    }

    /// The instance written with the parameters it leaves open.
    pub fn signature(self) -> &'static str {
        match self {
            Preset::Sqclp => "SQCLP(R, Q, C)",
            Preset::Qclp => "SQCLP(Sid, Q, C)",
            Preset::Sqlp => "SQCLP(R, Q, R)",
            Preset::Sclp => "SQCLP(R, B, C)",
            Preset::Qlp => "SQCLP(Sid, Q, R)",
            Preset::Slp => "SQCLP(R, U, R)",
            Preset::Clp => "SQCLP(Sid, B, C)",
            Preset::Lp => "SQCLP(Sid, B, H)",
        }
    }

    /// Combines the preset with explicit directives. Open parameters default
    /// to `U*W` and `R`.
    pub fn resolve(
        self,
        qdom: Option<QualDomain>,
        cdom: Option<ConstraintDomain>,
    ) -> Result<(QualDomain, ConstraintDomain), String> {
        let q = match (self.fixed_qdom(), qdom) {
            (Some(fixed), Some(given)) if fixed != given => {
                return Err(format!(
                    "preset {self} fixes the qualification domain to {fixed}, not {given}"
                ))
            }
            (Some(fixed), _) => fixed,
            (None, Some(given)) => given,
            (None, None) => QualDomain::product(QualDomain::Uncertainty, QualDomain::Weight),
        };
        let c = match (self.fixed_cdom(), cdom) {
            (Some(fixed), Some(given)) if fixed != given => {
                return Err(format!(
                    "preset {self} fixes the constraint domain to {fixed}, not {given}"
                ))
            }
            (Some(fixed), _) => fixed,
            (None, Some(given)) => given,
            (None, None) => ConstraintDomain::Real,
        };
        Ok((q, c))
    }

    /// Statements the preset forbids.
    pub fn check(self, src: &SourceProgram) -> Vec<SourceDiagnostic> {
        let mut out = Vec::new();
        if self.identity_proximity() {
            for (a, b, _, span) in &src.proximity {
                out.push(SourceDiagnostic {
                    span: Some(*span),
                    message: format!("preset {self} uses the identity proximity relation; cannot declare ~({a}, {b})"),
                });
            }
        }
        if src.qdom == QualDomain::Bool {
            let top = src.qdom.top();
            for (clause, span) in &src.clauses {
                if clause.attenuation != top {
                    out.push(SourceDiagnostic {
                        span: Some(*span),
                        message: format!("attenuation values are meaningless under preset {self}"),
                    });
                }
                if clause.body.iter().any(|b| b.threshold != Threshold::Any) {
                    out.push(SourceDiagnostic {
                        span: Some(*span),
                        message: format!("threshold values are meaningless under preset {self}"),
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
