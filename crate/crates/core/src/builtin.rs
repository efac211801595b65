//! Builtin model corpora: the MAPK cascade under three rate sets, the
//! IGF/EGF signalling network, and the three-species toy model.

use crate::dsl::{self, ModelSource, ParseDiagnostic};
use crate::network::ReactionNetwork;

pub const NAMES: [&str; 5] = ["mapk-exp1", "mapk-exp2", "mapk-exp3", "igf", "toy"];

const MAPK_EXP1: &str = "\
# MAPK cascade E1 -> MAP3K (K3) -> MAP2K (K2) -> MAPK (K), rate set 1
MODEL mapk-exp1
INPUT E1 = 1
SPECIES K3 TOTAL=100 INIT=0
SPECIES K2 TOTAL=100 INIT=0
SPECIES K TOTAL=100 INIT=0
ACTIVATE K3 BY E1 RATE 0.1
DEACTIVATE K3 AUTO RATE 0.1
ACTIVATE K2 BY K3 RATE 0.1
DEACTIVATE K2 AUTO RATE 2.0
ACTIVATE K BY K2 RATE 0.1
DEACTIVATE K AUTO RATE 1.0
";

const MAPK_EXP2: &str = "\
# MAPK cascade, rate set 2
MODEL mapk-exp2
INPUT E1 = 1
SPECIES K3 TOTAL=100 INIT=0
SPECIES K2 TOTAL=100 INIT=0
SPECIES K TOTAL=100 INIT=0
ACTIVATE K3 BY E1 RATE 0.2
DEACTIVATE K3 AUTO RATE 0.3
ACTIVATE K2 BY K3 RATE 0.2
DEACTIVATE K2 AUTO RATE 3.0
ACTIVATE K BY K2 RATE 0.2
DEACTIVATE K AUTO RATE 1.5
";

const MAPK_EXP3: &str = "\
# MAPK cascade, rate set 3
MODEL mapk-exp3
INPUT E1 = 1
SPECIES K3 TOTAL=100 INIT=0
SPECIES K2 TOTAL=100 INIT=0
SPECIES K TOTAL=100 INIT=0
ACTIVATE K3 BY E1 RATE 0.1
DEACTIVATE K3 AUTO RATE 0.3
ACTIVATE K2 BY K3 RATE 0.5
DEACTIVATE K2 AUTO RATE 5.0
ACTIVATE K BY K2 RATE 0.3
DEACTIVATE K AUTO RATE 4.0
";

// Activation rates are named v_child-parent. AKT carries both an
// activation and a deactivation rate on Raf.
const IGF: &str = "\
# Growth-factor signalling: EGFR/IGFR -> SOS -> Ras -> {PI3K -> AKT, Raf} -> Mek -> Erk
MODEL igf
INPUT EGFR = 37
INPUT IGFR = 5
SPECIES SOS TOTAL=100 INIT=0
SPECIES Ras TOTAL=100 INIT=0
SPECIES PI3K TOTAL=100 INIT=0
SPECIES AKT TOTAL=100 INIT=0
SPECIES Raf TOTAL=100 INIT=0
SPECIES Mek TOTAL=100 INIT=0
SPECIES Erk TOTAL=100 INIT=0

ACTIVATE SOS BY EGFR RATE 0.01
ACTIVATE SOS BY IGFR RATE 0.01
ACTIVATE Ras BY SOS RATE 0.01
ACTIVATE PI3K BY EGFR RATE 0.01
ACTIVATE PI3K BY IGFR RATE 0.01
ACTIVATE PI3K BY Ras RATE 0.01
ACTIVATE AKT BY PI3K RATE 0.01
ACTIVATE Raf BY Ras RATE 0.01
ACTIVATE Raf BY AKT RATE 0.01
ACTIVATE Mek BY Raf RATE 0.05
ACTIVATE Erk BY Mek RATE 0.05

DEACTIVATE SOS AUTO RATE 0.5
DEACTIVATE Ras AUTO RATE 0.5
DEACTIVATE PI3K AUTO RATE 0.5
DEACTIVATE AKT AUTO RATE 0.5
DEACTIVATE Raf AUTO RATE 0.3
DEACTIVATE Raf BY AKT RATE 0.01
DEACTIVATE Mek AUTO RATE 0.5
DEACTIVATE Erk AUTO RATE 0.5
";

// X1 activates Y, X2 deactivates Y; the roots are driven by unit inputs.
const TOY: &str = "\
MODEL toy
INPUT U1 = 1
INPUT U2 = 1
SPECIES X1 TOTAL=100 INIT=0
SPECIES X2 TOTAL=100 INIT=0
SPECIES Y TOTAL=100 INIT=0
ACTIVATE X1 BY U1 RATE 0.034
DEACTIVATE X1 AUTO RATE 0.066
ACTIVATE X2 BY U2 RATE 0.045
DEACTIVATE X2 AUTO RATE 0.055
ACTIVATE Y BY X1 RATE 0.01
DEACTIVATE Y BY X2 RATE 0.01
";

pub fn source(name: &str) -> Option<ModelSource> {
    let text = match name {
        "mapk-exp1" => MAPK_EXP1,
        "mapk-exp2" => MAPK_EXP2,
        "mapk-exp3" => MAPK_EXP3,
        "igf" => IGF,
        "toy" => TOY,
        _ => return None,
    };
    Some(ModelSource::new(text, format!("builtin:{name}")))
}

/// Parsed and validated builtin model.
pub fn load(name: &str) -> Result<ReactionNetwork, Vec<ParseDiagnostic>> {
    let src = source(name).ok_or_else(|| {
        vec![ParseDiagnostic::error(
            1,
            1,
            format!("unknown builtin `{name}` (expected one of {})", NAMES.join(", ")),
        )]
    })?;
    dsl::load(&src)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ReactionKind, Regulator};

    #[test]
    fn all_builtins_load() {
        for name in NAMES {
            let n = load(name).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            assert_eq!(n.name, name);
            assert!(n.validate().is_empty());
        }
    }

    #[test]
    fn mapk_exp1_contents() {
        let n = load("mapk-exp1").unwrap();
        assert_eq!(n.inputs.len(), 1);
        assert_eq!(n.inputs[0].value, 1);
        assert_eq!(n.species.len(), 3);
        assert!(n.species.iter().all(|s| s.total == 100 && s.init_active == 0));
        let rates: Vec<f64> = n.reactions.iter().map(|r| r.rate).collect();
        assert_eq!(rates, [0.1, 0.1, 0.1, 2.0, 0.1, 1.0]);
    }

    #[test]
    fn igf_contents() {
        let n = load("igf").unwrap();
        let value = |id: &str| n.inputs[n.input_index(id).unwrap()].value;
        assert_eq!(value("EGFR"), 37);
        assert_eq!(value("IGFR"), 5);
        assert_eq!(n.species.len(), 7);
        let act: Vec<f64> = n
            .reactions
            .iter()
            .filter(|r| r.kind == ReactionKind::Activate)
            .map(|r| r.rate)
            .collect();
        let deact: Vec<f64> = n
            .reactions
            .iter()
            .filter(|r| r.kind == ReactionKind::Deactivate)
            .map(|r| r.rate)
            .collect();
        assert_eq!(act.len(), 11);
        assert_eq!(deact.len(), 8);
        // 9 × 0.01 + 2 × 0.05
        assert!((act.iter().sum::<f64>() - 0.19).abs() < 1e-12);
        assert!((deact.iter().sum::<f64>() - 3.31).abs() < 1e-12);
        let autos = n
            .reactions
            .iter()
            .filter(|r| r.regulator == Regulator::Auto)
            .count();
        assert_eq!(autos, 7);
    }

    #[test]
    fn unknown_builtin() {
        assert!(load("nope").is_err());
    }
}
