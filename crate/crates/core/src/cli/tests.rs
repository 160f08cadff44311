use super::*;
use crate::dist::prob;

fn cfg(command: Command) -> RunConfig {
    RunConfig::new(command)
}

#[test]
fn every_table_renders_in_every_format() {
    for name in TABLES.iter().filter(|n| **n != "dprob") {
        for format in [Format::Text, Format::Json, Format::Csv] {
            let r = cmd_tables(name, format).unwrap();
            assert!(r.pass && !r.output.is_empty(), "{name}");
        }
    }
}

#[test]
fn smolin_and_unlock_tables_have_expected_rows() {
    let s = table("smolin").unwrap();
    assert_eq!(s.support_size(), 8);
    assert!(s.rows().all(|(_, p)| *p == prob(1, 8)));
    let u = table("unlock").unwrap();
    assert_eq!(u.support_size(), 4);
    assert!(u.rows().all(|(_, p)| *p == prob(1, 4)));
    assert!(matches!(table("nosuch"), Err(CliError::UnknownTable(_))));
}

#[test]
fn json_output_round_trips() {
    let r = cmd_tables("csec", Format::Json).unwrap();
    let back = JointDistribution::from_json(&r.output).unwrap();
    assert_eq!(back, table("csec").unwrap());
    let state = export("smolin-state", &cfg(Command::Export)).unwrap();
    let rho = crate::quantum::DensityOperator::from_json(&state.output).unwrap();
    assert!(rho.distance(&smolin_state()).unwrap() < 1e-15);
    let t = export("superactivate-transcript", &cfg(Command::Export)).unwrap();
    let back = ProtocolTranscript::from_json(&t.output).unwrap();
    assert!(back.snapshot("table-12").is_some());
}

#[test]
fn config_is_validated() {
    let mut c = cfg(Command::Verify);
    c.tolerance = 0.0;
    assert!(matches!(c.validate(), Err(CliError::Config(_))));
    let mut c = cfg(Command::Verify);
    c.search_budget = 0;
    assert!(c.validate().is_err());
    assert!("xml".parse::<Format>().is_err());
    let c = cfg(Command::Tables);
    assert!(matches!(run(&c, &Fixtures::default()), Err(CliError::Config(_))));
}

#[test]
fn protocol_lines() {
    let c = cfg(Command::Protocol);
    let r = cmd_protocol("superactivate", &c).unwrap();
    assert!(r.pass);
    for line in ["table-11 MATCH", "table-12 MATCH", "sbit(D,E) PASS"] {
        assert!(r.output.lines().any(|l| l == line), "{line}");
    }
    let r = cmd_protocol("ghz-extend", &c).unwrap();
    assert!(r.output.contains("16/16 branches fidelity 1.000000000 PASS"));
    let r = cmd_protocol("distribute-secret", &c).unwrap();
    assert!(r
        .output
        .contains("David bit == s in all branches PASS; I(s:EveView)=0 exact PASS"));
    assert!(matches!(cmd_protocol("nosuch", &c), Err(CliError::UnknownProtocol(_))));
}

#[test]
fn protocol_json_is_parseable() {
    let mut c = cfg(Command::Protocol);
    c.format = Format::Json;
    let r = cmd_protocol("unlock", &c).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.output).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["transcript"]["steps"].as_array().unwrap().len() > 1);
}

#[test]
fn measures_report_the_three_cuts() {
    let mut c = cfg(Command::Measures);
    c.format = Format::Json;
    let r = cmd_measures("smolin", &c).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.output).unwrap();
    let cuts = v["cuts"].as_array().unwrap();
    assert_eq!(cuts.len(), 3);
    for cut in cuts {
        assert_eq!(cut["search_upper"], 0.0);
        assert_eq!(cut["search_exact_zero"], true);
    }
    c.search_budget = 10;
    let r = cmd_measures("smolin", &c).unwrap();
    assert!(r.output.contains("\"search_upper\": null"));
}

#[test]
fn corrupted_fixture_fails_only_its_criterion() {
    let c = cfg(Command::Verify);
    let mut f = Fixtures::default();
    let mut bad = table("unlock").unwrap();
    bad = bad.post_select(&["A"], |v| v[0] == "0").unwrap().0;
    f.set("unlock", bad).unwrap();
    for n in [1, 2, 3, 9] {
        let r = run_criterion(n, &c, &f);
        assert_eq!(r.pass, n != 3, "criterion {n}: {}", r.observed);
    }
    assert!(f.set("nosuch", table("smolin").unwrap()).is_err());
}

#[test]
fn verify_json_summary() {
    let mut c = cfg(Command::Verify);
    c.format = Format::Json;
    let f = Fixtures::default();
    let results: Vec<CriterionResult> = [1, 2, 9].iter().map(|n| run_criterion(*n, &c, &f)).collect();
    assert!(results.iter().all(|r| r.pass));
    let text = serde_json::to_string(&results).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["criterion", "expected", "observed", "pass"] {
        assert!(v[0].get(key).is_some());
    }
    assert!(!run_criterion(11, &c, &f).pass);
}
