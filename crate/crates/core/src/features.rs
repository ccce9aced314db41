//! Fixed-width ontology feature vectors.
//!
//! Layout (48 columns):
//!
//! | index  | content |
//! |--------|---------|
//! | 0–19   | basic counts: ∃, ∀, classes, ⊓ groups, ⊔ groups, disjointness axioms, object properties, inverse-property axioms, nominals, individuals, role assertions, ≥, ≤, subclass axioms, equivalence axioms, sub-property axioms, domains, ranges, data properties, data assertions |
//! | 20–23  | functional / transitive / symmetric / inverse-functional property axioms |
//! | 24–26  | TBox / ABox / RBox share of logical axioms |
//! | 27–30  | rule-category ratios (≤+∀, ≥+∃, ⊔, ⊓) |
//! | 31     | individuals per class |
//! | 32–39  | axioms whose right-hand side starts with ⊔/≤, ⊓, ∀, ∃/≥ (`SubClassOf`, then `EquivalentClasses`) |
//! | 40–47  | constructors of the same four groups nested inside those right-hand sides |
//!
//! Connective groups (`⊓`, `⊔`) are counted on the flattened expression; the
//! pattern features look at the expression exactly as written.

use serde::{Deserialize, Serialize};

use crate::io::SourceDocument;
use crate::kb::{Axiom, AxiomBox, Concept, Signature};

pub const FEATURE_COUNT: usize = 48;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "f00_exists",
    "f01_forall",
    "f02_classes",
    "f03_conjunction_groups",
    "f04_disjunction_groups",
    "f05_disjoint_classes",
    "f06_object_properties",
    "f07_inverse_object_properties",
    "f08_nominals",
    "f09_instances",
    "f10_role_assertions",
    "f11_min_cardinalities",
    "f12_max_cardinalities",
    "f13_subclass_axioms",
    "f14_equivalent_classes",
    "f15_sub_object_properties",
    "f16_domains",
    "f17_ranges",
    "f18_data_properties",
    "f19_data_property_assertions",
    "f20_functional_properties",
    "f21_transitive_properties",
    "f22_symmetric_properties",
    "f23_inverse_functional_properties",
    "f24_tbox_ratio",
    "f25_abox_ratio",
    "f26_rbox_ratio",
    "f27_ratio_atmost_forall",
    "f28_ratio_atleast_exists",
    "f29_ratio_or",
    "f30_ratio_and",
    "f31_average_population",
    "f32_top_sub_orleq",
    "f33_top_sub_and",
    "f34_top_sub_forall",
    "f35_top_sub_existsgeq",
    "f36_top_eq_orleq",
    "f37_top_eq_and",
    "f38_top_eq_forall",
    "f39_top_eq_existsgeq",
    "f40_nested_sub_orleq",
    "f41_nested_sub_and",
    "f42_nested_sub_forall",
    "f43_nested_sub_existsgeq",
    "f44_nested_eq_orleq",
    "f45_nested_eq_and",
    "f46_nested_eq_forall",
    "f47_nested_eq_existsgeq",
];

/// Indices of the four rule-ratio features.
pub const RATIO_FEATURES: [usize; 4] = [27, 28, 29, 30];

/// Count features (everything except ratios and the population average).
pub fn is_count_feature(index: usize) -> bool {
    !(24..=31).contains(&index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(#[serde(with = "values_serde")] pub [f64; FEATURE_COUNT]);

mod values_serde {
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use super::FEATURE_COUNT;

    pub fn serialize<S: Serializer>(v: &[f64; FEATURE_COUNT], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; FEATURE_COUNT], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into().map_err(|v: Vec<f64>| D::Error::invalid_length(v.len(), &"48 values"))
    }
}

impl Default for FeatureVector {
    fn default() -> Self {
        FeatureVector([0.0; FEATURE_COUNT])
    }
}

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.0[i])
    }
}

/// Occurrence counts of the six rule-bearing constructors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleCounts {
    pub at_most: u64,
    pub forall: u64,
    pub or: u64,
    pub and: u64,
    pub at_least: u64,
    pub exists: u64,
}

/// `[≤+∀, ≥+∃, ⊔, ⊓]`, each over the sum of all six counts; zeros when that sum is zero.
pub fn rule_ratios(c: &RuleCounts) -> [f64; 4] {
    let total = c.at_most + c.forall + c.or + c.and + c.at_least + c.exists;
    if total == 0 {
        return [0.0; 4];
    }
    let t = total as f64;
    [
        (c.at_most + c.forall) as f64 / t,
        (c.at_least + c.exists) as f64 / t,
        c.or as f64 / t,
        c.and as f64 / t,
    ]
}

/// Pattern group of a constructor: 0 = ⊔/≤, 1 = ⊓, 2 = ∀, 3 = ∃/≥.
fn pattern_group(c: &Concept) -> Option<usize> {
    match c {
        Concept::Or(_) | Concept::AtMost(..) => Some(0),
        Concept::And(_) => Some(1),
        Concept::ForAll(..) => Some(2),
        Concept::Exists(..) | Concept::AtLeast(..) => Some(3),
        _ => None,
    }
}

fn right_hand_sides(ax: &Axiom) -> Option<(usize, Vec<&Concept>)> {
    match ax {
        Axiom::SubClassOf(_, d) => Some((0, vec![d])),
        Axiom::EquivalentClasses(cs) => {
            Some((1, cs.iter().filter(|c| !matches!(c, Concept::Atomic(_))).collect()))
        }
        _ => None,
    }
}

/// `[top-level ⊑ ×4, top-level ≡ ×4, nested ⊑ ×4, nested ≡ ×4]`.
pub fn pattern_counts(doc: &SourceDocument) -> [f64; 16] {
    let mut top = [[0u64; 4]; 2];
    let mut nested = [[0u64; 4]; 2];
    for ax in &doc.axioms {
        let Some((kind, rhs)) = right_hand_sides(ax) else { continue };
        for c in rhs {
            if let Some(g) = pattern_group(c) {
                top[kind][g] += 1;
            }
            for child in c.children() {
                child.walk(&mut |d| {
                    if let Some(g) = pattern_group(d) {
                        nested[kind][g] += 1;
                    }
                });
            }
        }
    }
    let mut out = [0.0; 16];
    for g in 0..4 {
        out[g] = top[0][g] as f64;
        out[4 + g] = top[1][g] as f64;
        out[8 + g] = nested[0][g] as f64;
        out[12 + g] = nested[1][g] as f64;
    }
    out
}

#[derive(Default)]
struct ConstructorCounts {
    rules: RuleCounts,
    nominals: u64,
}

impl ConstructorCounts {
    fn add(&mut self, c: &Concept) {
        // groups are counted after flattening, everything else on the surface form
        c.flatten().walk(&mut |d| match d {
            Concept::And(_) => self.rules.and += 1,
            Concept::Or(_) => self.rules.or += 1,
            _ => {}
        });
        c.walk(&mut |d| match d {
            Concept::Exists(..) => self.rules.exists += 1,
            Concept::ForAll(..) => self.rules.forall += 1,
            Concept::AtLeast(..) => self.rules.at_least += 1,
            Concept::AtMost(..) => self.rules.at_most += 1,
            Concept::Nominal(_) => self.nominals += 1,
            _ => {}
        });
    }
}

pub fn extract_features(doc: &SourceDocument) -> FeatureVector {
    let mut sig = Signature::default();
    let mut cc = ConstructorCounts::default();
    let mut axiom_counts = [0u64; 17];
    let (mut tbox, mut abox, mut rbox) = (0u64, 0u64, 0u64);

    for ax in &doc.axioms {
        sig.extend_from_axiom(ax);
        for c in ax.concepts() {
            cc.add(c);
        }
        match ax.axiom_box() {
            AxiomBox::TBox => tbox += 1,
            AxiomBox::ABox => abox += 1,
            AxiomBox::RBox => rbox += 1,
            AxiomBox::Declaration => {}
        }
        let slot = match ax {
            Axiom::DisjointClasses(_) => 0,
            Axiom::InverseObjectProperties(..) => 1,
            Axiom::PropertyAssertion(..) => 2,
            Axiom::SubClassOf(..) => 3,
            Axiom::EquivalentClasses(_) => 4,
            Axiom::SubObjectPropertyOf(..) => 5,
            Axiom::Domain(..) => 6,
            Axiom::Range(..) => 7,
            Axiom::DataPropertyAssertion(..) => 8,
            Axiom::FunctionalProperty(_) => 9,
            Axiom::TransitiveProperty(_) => 10,
            Axiom::SymmetricProperty(_) => 11,
            Axiom::InverseFunctionalProperty(_) => 12,
            _ => 16,
        };
        axiom_counts[slot] += 1;
    }

    let mut f = [0.0; FEATURE_COUNT];
    let r = &cc.rules;
    let classes = sig.classes.len() as f64;
    let individuals = sig.individuals.len() as f64;
    f[0] = r.exists as f64;
    f[1] = r.forall as f64;
    f[2] = classes;
    f[3] = r.and as f64;
    f[4] = r.or as f64;
    f[5] = axiom_counts[0] as f64;
    f[6] = sig.roles.len() as f64;
    f[7] = axiom_counts[1] as f64;
    f[8] = cc.nominals as f64;
    f[9] = individuals;
    f[10] = axiom_counts[2] as f64;
    f[11] = r.at_least as f64;
    f[12] = r.at_most as f64;
    f[13] = axiom_counts[3] as f64;
    f[14] = axiom_counts[4] as f64;
    f[15] = axiom_counts[5] as f64;
    f[16] = axiom_counts[6] as f64;
    f[17] = axiom_counts[7] as f64;
    f[18] = sig.data_properties.len() as f64;
    f[19] = axiom_counts[8] as f64;
    for k in 0..4 {
        f[20 + k] = axiom_counts[9 + k] as f64;
    }
    let logical = tbox + abox + rbox;
    if logical > 0 {
        let l = logical as f64;
        f[24] = tbox as f64 / l;
        f[25] = abox as f64 / l;
        f[26] = rbox as f64 / l;
    }
    f[27..31].copy_from_slice(&rule_ratios(r));
    f[31] = if classes > 0.0 { individuals / classes } else { 0.0 };
    f[32..48].copy_from_slice(&pattern_counts(doc));
    FeatureVector(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_document;

    fn features(text: &str) -> FeatureVector {
        extract_features(&parse_document(text).unwrap())
    }

    #[test]
    fn names_are_unique_and_ordered() {
        for (i, n) in FEATURE_NAMES.iter().enumerate() {
            assert!(n.starts_with(&format!("f{i:02}_")), "{n}");
        }
        let set: std::collections::HashSet<_> = FEATURE_NAMES.iter().collect();
        assert_eq!(set.len(), FEATURE_COUNT);
    }

    #[test]
    fn empty_document_is_all_zeros() {
        assert_eq!(extract_features(&SourceDocument::default()), FeatureVector::default());
    }

    #[test]
    fn single_union_axiom() {
        let f = features("SubClassOf(A ObjectUnionOf(B C))");
        assert_eq!(f.get("f02_classes"), Some(3.0));
        assert_eq!(f.get("f04_disjunction_groups"), Some(1.0));
        assert_eq!(f.get("f32_top_sub_orleq"), Some(1.0));
        assert_eq!(f.get("f13_subclass_axioms"), Some(1.0));
        assert_eq!(f.get("f24_tbox_ratio"), Some(1.0));
        assert_eq!(f.get("f29_ratio_or"), Some(1.0));
    }

    #[test]
    fn average_population() {
        let mut text = String::new();
        for i in 0..5 {
            text.push_str(&format!("Declaration(Class(C{i}))\n"));
        }
        for i in 0..10 {
            text.push_str(&format!("ClassAssertion(C{} a{i})\n", i % 5));
        }
        let f = features(&text);
        assert_eq!(f.get("f31_average_population"), Some(2.0));
        assert_eq!(f.get("f09_instances"), Some(10.0));
        assert_eq!(f.get("f25_abox_ratio"), Some(1.0));
    }

    #[test]
    fn rule_ratio_examples() {
        let c = RuleCounts { at_most: 1, forall: 1, or: 1, and: 1, at_least: 0, exists: 0 };
        assert_eq!(rule_ratios(&c), [0.5, 0.0, 0.25, 0.25]);
        assert_eq!(rule_ratios(&RuleCounts::default()), [0.0; 4]);
        let c = RuleCounts { and: 4, ..Default::default() };
        assert_eq!(rule_ratios(&c), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn pattern_examples() {
        let doc = parse_document("SubClassOf(A ObjectUnionOf(B ObjectAllValuesFrom(R C)))").unwrap();
        let p = pattern_counts(&doc);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[8 + 2], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 2.0);

        let doc = parse_document("EquivalentClasses(A ObjectIntersectionOf(B C))").unwrap();
        let p = pattern_counts(&doc);
        assert_eq!(p[4 + 1], 1.0);
        assert_eq!(p[8..].iter().sum::<f64>(), 0.0);

        let doc =
            parse_document("SubClassOf(A ObjectUnionOf(B ObjectUnionOf(C ObjectAllValuesFrom(R D))))").unwrap();
        let p = pattern_counts(&doc);
        assert_eq!(p[8], 1.0);
        assert_eq!(p[10], 1.0);
    }

    #[test]
    fn equivalence_with_two_complex_sides_scans_both() {
        let doc = parse_document(
            "EquivalentClasses(ObjectSomeValuesFrom(R A) ObjectIntersectionOf(B ObjectAllValuesFrom(R C)))",
        )
        .unwrap();
        let p = pattern_counts(&doc);
        assert_eq!(&p[4..8], &[0.0, 1.0, 0.0, 1.0]);
        assert_eq!(&p[12..16], &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn nested_groups_counted_after_flattening() {
        let f = features("SubClassOf(A ObjectUnionOf(B ObjectUnionOf(C D)))");
        assert_eq!(f.get("f04_disjunction_groups"), Some(1.0));
        let f = features("SubClassOf(A ObjectIntersectionOf(B ObjectUnionOf(C D)))");
        assert_eq!(f.get("f03_conjunction_groups"), Some(1.0));
        assert_eq!(f.get("f04_disjunction_groups"), Some(1.0));
    }

    #[test]
    fn nominals_count_individuals_in_one_of() {
        let f = features("EquivalentClasses(C ObjectOneOf(a b c))");
        assert_eq!(f.get("f08_nominals"), Some(3.0));
        assert_eq!(f.get("f09_instances"), Some(3.0));
    }
}
