//! Pretty-printing a parsed program gives source that parses back to the
//! same program.

mod common;

use alma0::syntax::{parser, pretty, token};

#[test]
fn corpus_round_trips() {
    for entry in std::fs::read_dir(common::corpus_path("")).unwrap() {
        let path = entry.unwrap().path();
        let src = std::fs::read_to_string(&path).unwrap();
        let module = parser::parse(&token::tokenize(&src).unwrap()).unwrap();
        let printed = pretty::module_to_string(&module);
        let reparsed = parser::parse(&token::tokenize(&printed).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}\n{printed}", path.display()));
        assert_eq!(pretty::module_to_string(&reparsed), printed, "{}", path.display());
        // the printed program behaves like the original
        assert_eq!(common::first(&printed), common::first(&src), "{}", path.display());
    }
}
