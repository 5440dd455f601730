// SPDX-License-Identifier: Apache-2.0

use fifo_advisor::{parse_trace, write_trace, ParseError};
use fifo_advisor_core::benchgen;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fuzzed_programs_survive_a_round_trip(seed in any::<u64>()) {
        let p = benchgen::fuzz(seed);
        let text = write_trace(&p);
        let back = parse_trace(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(write_trace(&back), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored(seed in 0u64..1000, pad in "[ \t]{0,3}") {
        let p = benchgen::fuzz(seed);
        let noisy: String = write_trace(&p)
            .lines()
            .map(|l| format!("{pad}{l}{pad} # note\n\n"))
            .collect();
        prop_assert_eq!(parse_trace(&noisy).unwrap(), p);
    }
}

#[test]
fn suite_round_trips() {
    for entry in benchgen::suite() {
        let p = benchgen::generate(&entry.spec).unwrap();
        assert_eq!(parse_trace(&write_trace(&p)).unwrap(), p, "{}", entry.name);
    }
}

#[test]
fn write_then_read_file() {
    let mut text = String::from("trace-format 1\nprogram write_then_read\nfifo 0 x width=32\nfifo 1 y width=32\ntask 0 producer\n");
    text += &"  w 0\n".repeat(8);
    text += &"  w 1\n".repeat(8);
    text += "end\ntask 1 consumer\n";
    text += &"  r 0\n  r 1\n".repeat(8);
    text += "end\n";
    let p = parse_trace(&text).unwrap();
    assert_eq!((p.task_count(), p.fifo_count()), (2, 2));
    assert_eq!((p.write_count(0), p.write_count(1)), (8, 8));
}

#[test]
fn semantic_errors_name_the_fifo() {
    let dup = "trace-format 1\nfifo 0 a width=8\nfifo 1 a width=8\ntask 0 t\n  w 0\nend\ntask 1 u\n  r 0\nend\n";
    let err = parse_trace(dup).unwrap_err();
    assert!(matches!(err, ParseError::Invalid(_)));
    let msg = err.to_string();
    assert!(msg.contains("`a` is declared more than once"), "{msg}");

    let self_loop = "trace-format 1\nfifo 0 a width=8\ntask 0 t\n  w 0\n  r 0\nend\n";
    let msg = parse_trace(self_loop).unwrap_err().to_string();
    assert!(msg.contains("`a` is both written and read by task `t`"), "{msg}");
}
