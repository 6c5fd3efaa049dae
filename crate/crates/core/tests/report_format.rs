use gwsym::report::{Entry, Report, Section, Verdict};
use gwsym::scenario::ScenarioError;
use gwsym::suite::{self, Command, Target};
use gwsym::{Format, Scenario};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = String> {
    "[a-z0-9 \\\\\t\n\r|:=#()^*/+-]{0,16}"
}

fn entry() -> impl Strategy<Value = Entry> {
    prop_oneof![
        (field(), field()).prop_map(|(key, value)| Entry::Value { key, value }),
        field().prop_map(Entry::Trace),
        (
            field(),
            any::<bool>(),
            field(),
            prop::collection::vec(field(), 0..3),
            field(),
            field()
        )
            .prop_map(|(id, passed, claim, detail, citation, quote)| Entry::Verdict(Verdict {
                id,
                passed,
                claim,
                detail,
                citation,
                quote
            })),
    ]
}

fn report() -> impl Strategy<Value = Report> {
    let section = (field(), prop::collection::vec(entry(), 0..5)).prop_map(|(name, entries)| Section { name, entries });
    (field(), prop::collection::vec(section, 0..4)).prop_map(|(command, sections)| {
        let mut r = Report::new(command);
        r.sections = sections;
        r
    })
}

proptest! {
    #[test]
    fn machine_format_round_trips(r in report()) {
        let m = r.to_machine();
        prop_assert_eq!(m.lines().count(), m.matches('\n').count());
        prop_assert_eq!(Report::from_machine(&m).unwrap(), r);
    }

    #[test]
    fn text_counts_verdicts(r in report()) {
        let total = r.verdicts().count();
        let passed = r.verdicts().filter(|v| v.passed).count();
        let text = r.to_text();
        let summary = format!("{passed} of {total} verdicts passed");
        prop_assert!(text.contains(&summary));
    }

    #[test]
    fn scenario_parser_never_panics(s in "[a-z0-9_=,.#/*^ \n-]{0,64}") {
        let _ = Scenario::parse(&s);
    }

    #[test]
    fn oracle_samples_parse(v in prop::collection::vec(0.01f64..1e6, 1..5)) {
        let text: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        let s = Scenario::parse(&format!("oracle_rho = {}", text.join(", "))).unwrap();
        prop_assert_eq!(s.oracle_rho, v);
    }
}

#[test]
fn truncated_machine_report_is_rejected() {
    let m = suite::run(&Command::PairingTable, &Scenario::default()).to_machine();
    let cut = m.trim_end().rsplit_once('\n').unwrap().0;
    assert!(Report::from_machine(cut).is_err());
}

#[test]
fn runs_are_deterministic() {
    let s = Scenario::default();
    let a = suite::run(&Command::Verify(Target::Cancellation), &s).to_machine();
    let b = suite::run(&Command::Verify(Target::Cancellation), &s).to_machine();
    assert_eq!(a, b);
}

#[test]
fn custom_covectors_drive_the_pairing_table() {
    let text = "zeta1 = 2, 0, 2, 0\nzeta2 = -2, 0, 0, -2\nzeta3 = rho^-10, rho^-10, 0, 0\nzeta4 = 2*rho^10, -2*rho^10, 0, 0\nformat = machine\n";
    let s = Scenario::parse(text).unwrap();
    assert_eq!(s.format, Format::Machine);
    let r = suite::run(&Command::PairingTable, &s);
    assert_eq!(r.value("h(zeta1,zeta3)"), Some("-2*rho^-10"));
    assert!(!r.verdict("pairings").unwrap().passed);
}

#[test]
fn partial_covectors_are_rejected() {
    let e = Scenario::parse("zeta2 = -1, 0, 0, -1\nzeta4 = rho^10, -rho^10, 0, 0").unwrap_err();
    assert_eq!(e, ScenarioError::PartialCovectors("zeta2, zeta4".into()));
}
