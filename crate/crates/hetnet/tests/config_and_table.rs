use hetnet::config::{AnalyticSection, SimulationSection};
use hetnet::{ClosedForm, Mode, Overrides, ResultTable, RunConfig, SweepSpec, HEADER};
use hetnet_core::{CurvePoint, Scheme, Source, SweepAxis, SystemParams};

fn config_error(text: &str) -> String {
    match RunConfig::from_toml(text) {
        Err(e @ hetnet::CliError::Config(_)) => {
            assert_eq!(e.exit_code(), 2);
            e.to_string()
        }
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn minimal_file_yields_defaults() {
    let cfg = RunConfig::from_toml("schema_version = 1\n").unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!(cfg.schemes, vec![Scheme::Double]);
    let sweep = cfg.sweep_spec();
    assert_eq!((sweep.axis, sweep.values), (SweepAxis::Beta, vec![0.0]));
}

#[test]
fn full_file_round_trips_through_toml() {
    let cfg = RunConfig {
        mode: Some(Mode::Both),
        schemes: vec![Scheme::Single, Scheme::Double, Scheme::KPlusOne(3)],
        closed_form: ClosedForm::Off,
        out: Some("out/run.csv".into()),
        params: SystemParams {
            epsilon: 0.75,
            p_max_dbm: 40.0,
            beta_db: 5.0,
            ..SystemParams::default()
        },
        sweep: Some(SweepSpec {
            axis: SweepAxis::LambdaSbs,
            values: vec![0.02, 0.035],
        }),
        simulation: SimulationSection {
            n_realizations: 50,
            seed: 9,
            window_side: 80.0,
        },
        analytic: AnalyticSection {
            rel_tol: 1e-7,
            ..AnalyticSection::default()
        },
        ..RunConfig::default()
    };
    let text = cfg.to_toml().unwrap();
    assert_eq!(RunConfig::from_toml(&text).unwrap(), cfg, "{text}");
}

#[test]
fn documented_example_parses() {
    let text = r#"
        schema_version = 1
        mode = "both"
        schemes = ["SA", "DA", "KPLUS1(2)"]
        closed_form = "auto"

        [params]
        lambda_mbs = 0.01
        lambda_sbs = 0.02
        alpha = 4.0
        epsilon = 0.5
        p_default_dbm = 30.0
        p_max_dbm = 50.0
        beta_db = 0.0
        fpc_anchor = "mbs"

        [sweep]
        axis = "lambda_sbs"
        values = [0.02, 0.035, 0.05]

        [simulation]
        n_realizations = 2000
        seed = 1
        window_side = 100.0

        [analytic]
        rel_tol = 1e-6
        abs_tol = 1e-9
        truncation = 1e-12
        kernel_step = 0.02
    "#;
    let cfg = RunConfig::from_toml(text).unwrap();
    assert_eq!(cfg.schemes[2], Scheme::KPlusOne(2));
    assert_eq!(cfg.sweep.unwrap().values.len(), 3);
}

#[test]
fn unknown_keys_are_rejected_at_every_level() {
    assert!(config_error("schema_version = 1\nseeds = 3\n").contains("seeds"));
    assert!(config_error("schema_version = 1\n[params]\nlambda = 0.01\n").contains("lambda"));
    assert!(
        config_error("schema_version = 1\n[sweep]\naxis = \"k\"\nvalues = [1]\nstep = 2\n")
            .contains("step")
    );
    assert!(config_error("schema_version = 1\n[simulation]\nthreads = 2\n").contains("threads"));
    assert!(config_error("schema_version = 1\n[plot]\n").contains("plot"));
}

#[test]
fn schema_version_is_required_and_checked() {
    assert!(config_error("").contains("schema_version"));
    assert!(config_error("schema_version = 2\n").contains("schema_version"));
}

#[test]
fn invalid_values_name_their_field() {
    assert!(
        config_error("schema_version = 1\n[params]\nepsilon = 1.5\n").contains("params.epsilon")
    );
    assert!(config_error("schema_version = 1\n[params]\nalpha = 2.0\n").contains("params.alpha"));
    assert!(
        config_error("schema_version = 1\n[simulation]\nn_realizations = 1\n")
            .contains("simulation.n_realizations")
    );
    assert!(
        config_error("schema_version = 1\n[simulation]\nwindow_side = -1.0\n")
            .contains("simulation.")
    );
    assert!(config_error("schema_version = 1\nschemes = []\n").contains("schemes"));
    assert!(config_error("schema_version = 1\nschemes = [\"DA\", \"da\"]\n").contains("twice"));
    assert!(config_error("schema_version = 1\nschemes = [\"XA\"]\n").contains("XA"));
    assert!(config_error("schema_version = 1\nmode = \"fast\"\n").contains("fast"));
    let e = config_error("schema_version = 1\n[sweep]\naxis = \"epsilon\"\nvalues = [0.5, -1.0]\n");
    assert!(e.contains("sweep.values") && e.contains("entry 1"), "{e}");
    assert!(
        config_error("schema_version = 1\n[sweep]\naxis = \"k\"\nvalues = [0.5]\n")
            .contains("sweep.values")
    );
    assert!(
        config_error("schema_version = 1\n[sweep]\naxis = \"beta\"\nvalues = []\n")
            .contains("sweep.values")
    );
    assert!(config_error("schema_version = 1\n[analytic]\nrel_tol = 0.0\n").contains("analytic"));
}

#[test]
fn overrides_take_precedence() {
    let mut cfg =
        RunConfig::from_toml("schema_version = 1\nmode = \"analytic\"\n[simulation]\nseed = 4\n")
            .unwrap();
    cfg.apply(&Overrides {
        seed: Some(10),
        trials: Some(30),
        window_side: Some(70.0),
        out: Some("x.csv".into()),
        mode: Some(Mode::Both),
    });
    assert_eq!(
        cfg.simulation,
        SimulationSection {
            n_realizations: 30,
            seed: 10,
            window_side: 70.0
        }
    );
    assert_eq!(cfg.mode, Some(Mode::Both));
    assert_eq!(cfg.out.as_deref(), Some(std::path::Path::new("x.csv")));
    let mut untouched = cfg.clone();
    untouched.apply(&Overrides::default());
    assert_eq!(untouched, cfg);
}

fn sample_rows() -> Vec<CurvePoint> {
    let base = CurvePoint {
        scheme: Scheme::Double,
        axis_name: SweepAxis::LambdaSbs,
        axis_value: 0.035,
        beta_db: 0.0,
        epsilon: 0.5,
        lambda_sbs: 0.035,
        p_max_dbm: 50.0,
        source: Source::Sim,
        p_success: 0.1 + 0.2,
        ci_half_width: 1.234e-300,
        ase: 0.009059,
        n_realizations: 2000,
        seed: u64::MAX,
    };
    vec![
        base.clone(),
        CurvePoint {
            scheme: Scheme::Single,
            source: Source::Analytic,
            n_realizations: 0,
            seed: 0,
            ..base.clone()
        },
        CurvePoint {
            scheme: Scheme::KPlusOne(4),
            axis_name: SweepAxis::K,
            source: Source::ClosedForm,
            ..base.clone()
        },
        CurvePoint {
            axis_name: SweepAxis::Epsilon,
            axis_value: -0.0,
            p_success: 1.0 / 3.0,
            ..base.clone()
        },
        CurvePoint {
            axis_name: SweepAxis::Beta,
            beta_db: -7.25,
            ..base
        },
    ]
}

#[test]
fn csv_header_is_exact() {
    let text = ResultTable::new(sample_rows()).to_csv_string().unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "scheme,axis_name,axis_value,beta_db,epsilon,lambda_sbs,p_max_dbm,source,p_success,ci_half_width,ase,n_realizations,seed"
    );
    assert_eq!(HEADER.join(","), text.lines().next().unwrap());
    assert_eq!(
        ResultTable::default()
            .to_csv_string()
            .unwrap()
            .lines()
            .count(),
        1
    );
    assert!(
        text.contains("KPLUS1(4),k,")
            && text.contains(",closed_form,")
            && text.contains(",analytic,")
    );
}

#[test]
fn csv_round_trips_exactly() {
    let table = ResultTable::new(sample_rows());
    let text = table.to_csv_string().unwrap();
    let back = ResultTable::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back, table);
    for (a, b) in back.rows.iter().zip(&table.rows) {
        assert_eq!(a.p_success.to_bits(), b.p_success.to_bits());
        assert_eq!(a.axis_value.to_bits(), b.axis_value.to_bits());
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/table.csv");
    table.write_path(&path).unwrap();
    assert_eq!(ResultTable::read_path(&path).unwrap(), table);
}

#[test]
fn csv_with_a_foreign_header_is_rejected() {
    assert!(ResultTable::read_csv("scheme,value\nDA,1\n".as_bytes()).is_err());
}
