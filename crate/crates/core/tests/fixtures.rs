// SPDX-License-Identifier: Apache-2.0
//! End-to-end checks over the shared fixture corpus.

use thresh_core::compile::{bundle, compile, unbundle, CompileOptions};
use thresh_core::convert::{Capability, ConvertFailure, ConverterRegistry};
use thresh_core::data::{
    check_annotation_set, check_instance_bounds, parse_annotations, parse_instances,
    serialize_annotations,
};
use thresh_core::typology::{parse_template, QuestionKind, Selection, SideRule, Typology};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn template(name: &str) -> Typology {
    let parsed = parse_template(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert!(parsed.warnings.is_empty(), "{name}: {:?}", parsed.warnings);
    parsed.typology
}

#[test]
fn salsa_structure() {
    let t = template("salsa.yml");
    assert_eq!(t.name, "salsa-lite");
    assert_eq!(t.flatten().len(), 3);
    assert_eq!(t.category_depth(), 2);
    let structure = t.category("structure").unwrap();
    assert_eq!(structure.selection, Selection::Composite);
    assert_eq!(structure.children.len(), 2);
    let deletion = t.category("deletion").unwrap();
    assert_eq!(deletion.side, SideRule::Source);
    let impact = deletion.find_question("impact").unwrap();
    assert_eq!(impact.triggered(Some(1))[0].id, "severity");
    assert!(impact.triggered(Some(0)).is_empty());
}

#[test]
fn salsa_citation_survives_verbatim() {
    let t = template("salsa.yml");
    let raw: serde_yaml::Value = serde_yaml::from_str(&fixture("salsa.yml")).unwrap();
    assert_eq!(
        t.config.citation.as_deref(),
        raw["config"]["citation"].as_str()
    );
    assert!(t
        .config
        .citation
        .unwrap()
        .contains("title = {A {SALSA}-style"));
}

/// A plain YAML reading of the file must agree with the typed loader.
#[test]
fn salsa_matches_generic_yaml_reading() {
    let t = template("salsa.yml");
    let raw: serde_yaml::Value = serde_yaml::from_str(&fixture("salsa.yml")).unwrap();
    fn walk(v: &serde_yaml::Value, out: &mut Vec<(String, String, String)>) {
        for c in v.as_sequence().into_iter().flatten() {
            out.push((
                c["name"].as_str().unwrap().to_string(),
                c["label"].as_str().unwrap().to_string(),
                c["color"].as_str().unwrap().to_string(),
            ));
            walk(&c["children"], out);
        }
    }
    let mut generic = Vec::new();
    walk(&raw["edits"], &mut generic);
    let typed: Vec<_> = t
        .flatten()
        .iter()
        .map(|c| (c.name.clone(), c.label.clone(), c.color.clone()))
        .collect();
    assert_eq!(generic, typed);
}

#[test]
fn salsa_annotations_validate_and_compile() {
    let t = template("salsa.yml");
    let instances = parse_instances(&fixture("salsa_instances.json"), &t.config).unwrap();
    let set = parse_annotations(&fixture("salsa_annotations.json"), &t, &instances).unwrap();
    assert!(check_annotation_set(&set, &t, Some(&instances)).is_empty());
    assert_eq!(set.edit_count(), 3);

    let ir = compile(
        &t,
        &instances,
        &CompileOptions {
            annotations: vec![set],
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(ir.instances.len(), 3);
    assert_eq!(ir.panes.len(), 1);
    assert_eq!(ir.panes[0].entries.len(), 3);
    assert!(ir.instructions.is_some());
}

#[test]
fn salsa_annotations_need_composite_support_in_offset_label() {
    let t = template("salsa.yml");
    let err = ConverterRegistry::with_builtins()
        .convert(
            "unified",
            "offset-label",
            &fixture("salsa_annotations.json"),
            &t,
        )
        .unwrap_err();
    match err {
        ConvertFailure::Convert(e) => assert!(e.features().contains(&Capability::Composite)),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn mqm_every_category_rates_severity() {
    let t = template("mqm.yml");
    assert_eq!(t.flatten().len(), 10);
    for c in t.flatten() {
        let q = c
            .find_question("severity")
            .unwrap_or_else(|| panic!("{} lacks severity", c.name));
        assert_eq!(q.kind, QuestionKind::Scale3);
        assert_eq!(q.options, ["minor", "major", "critical"]);
    }
    assert_eq!(t.category("omission").unwrap().side, SideRule::Source);
    assert!(t.localization.contains_key("es"));
}

#[test]
fn mqm_round_trips_through_offset_label() {
    let t = template("mqm.yml");
    let instances = parse_instances(&fixture("mqm_instances.json"), &t.config).unwrap();
    let original = parse_annotations(&fixture("mqm_annotations.json"), &t, &instances).unwrap();
    let registry = ConverterRegistry::with_builtins();
    let unified = serialize_annotations(&original);
    let external = registry
        .convert("unified", "offset-label", &unified, &t)
        .unwrap();
    let back = registry
        .convert("offset-label", "unified", &external, &t)
        .unwrap();
    assert_eq!(back, unified);
}

#[test]
fn grammar_has_35_leaves_with_question_trees() {
    let t = template("grammar35.yml");
    assert_eq!(t.leaf_count(), 35);
    assert_eq!(t.category_depth(), 1);
    for c in t.flatten() {
        let obvious = c.find_question("obvious").unwrap();
        let correction = &obvious.triggered(Some(1))[0];
        assert_eq!(correction.kind, QuestionKind::Textbox);
        assert_eq!(correction.triggered(None)[0].id, "confidence");
        assert_eq!(
            obvious.triggered(Some(0))[0].triggered(Some(2))[0].id,
            "explanation"
        );
    }
    let instances = parse_instances(&fixture("grammar35_instances.json"), &t.config).unwrap();
    let ir = compile(&t, &instances, &CompileOptions::default()).unwrap();
    assert_eq!(ir.palette.len(), 35);
}

#[test]
fn every_fixture_bundles_and_unbundles() {
    for (tpl, data, ann) in [
        (
            "salsa.yml",
            "salsa_instances.json",
            Some("salsa_annotations.json"),
        ),
        (
            "mqm.yml",
            "mqm_instances.json",
            Some("mqm_annotations.json"),
        ),
        ("grammar35.yml", "grammar35_instances.json", None),
    ] {
        let a = ann.map(fixture);
        let bytes = bundle(&fixture(tpl), &fixture(data), a.as_deref()).unwrap();
        let b = unbundle(&bytes).unwrap();
        assert_eq!(b.template, fixture(tpl));
        assert_eq!(b.instances, fixture(data));
        assert_eq!(b.annotations, a);
    }
}

#[test]
fn spanish_pack_with_template_override() {
    use thresh_core::compile::CompileError;
    let t = template("mqm.yml");
    let instances = parse_instances(&fixture("mqm_instances.json"), &t.config).unwrap();
    let es = CompileOptions {
        locale: Some("es".into()),
        ..Default::default()
    };
    let ir = compile(&t, &instances, &es).unwrap();
    assert_eq!(ir.config.language, "es");
    assert_eq!(ir.strings["button.submit"], "Enviar evaluación");
    let pack: serde_yaml::Value =
        serde_yaml::from_str(include_str!("../resources/locales/es.yaml")).unwrap();
    for (k, v) in &ir.strings {
        if k != "button.submit" {
            assert_eq!(pack[k.as_str()].as_str(), Some(v.as_str()), "{k}");
        }
    }
    let grammar = ir.palette.iter().find(|c| c.name == "grammar").unwrap();
    assert_eq!(grammar.label, "Fluidez: Gramática");
    let spelling = ir.palette.iter().find(|c| c.name == "spelling").unwrap();
    assert_eq!(spelling.label, "Fluency: Spelling");

    let xx = CompileOptions {
        locale: Some("xx".into()),
        ..Default::default()
    };
    assert!(
        matches!(compile(&t, &instances, &xx), Err(CompileError::UnknownLocale(c)) if c == "xx")
    );
}

#[test]
fn subword_mode_needs_bounds_for_every_selectable_side() {
    let mut t = template("salsa.yml");
    let instances = parse_instances(&fixture("salsa_instances.json"), &t.config).unwrap();
    assert!(check_instance_bounds(&t, &instances).is_empty());

    t.config.boundary = thresh_core::typology::Boundary::Subword;
    let paths: Vec<String> = check_instance_bounds(&t, &instances)
        .into_iter()
        .map(|d| d.path)
        .collect();
    let expected: Vec<String> = instances
        .iter()
        .flat_map(|i| {
            [
                format!("instances[{}].token_bounds_target", i.id),
                format!("instances[{}].token_bounds_source", i.id),
            ]
        })
        .collect();
    assert_eq!(paths, expected);

    // Only the target side is selectable in the grammar typology.
    let mut g = template("grammar35.yml");
    g.config.boundary = thresh_core::typology::Boundary::Subword;
    let insts = parse_instances(&fixture("grammar35_instances.json"), &g.config).unwrap();
    let diags = check_instance_bounds(&g, &insts);
    assert_eq!(diags.len(), insts.len());
    assert!(diags
        .iter()
        .all(|d| d.code == "E_MISSING_BOUNDS" && d.path.ends_with("token_bounds_target")));
}
