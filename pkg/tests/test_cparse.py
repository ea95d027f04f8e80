"""Lexer and parser behavior, including two real QEMU functions."""

from collections import Counter

import pytest

from pathvuln.errors import LexError, ParseError, ParseUnsupported
from pathvuln.lexer import strip_directives, tokenize
from pathvuln.parser import (
    Ast,
    AstNode,
    NODE_KINDS,
    ast_from_json,
    node_from_json,
    parse_function,
    parse_source,
    split_functions,
    validate_node,
)

from fixtures import SCSI_ABORT, SHR_CC


# --- lexer ----------------------------------------------------------------

def kinds_and_texts(source):
    return [(t.kind, t.text) for t in tokenize(source)]


def test_tokenize_basic_statement():
    assert kinds_and_texts("shift &= 63;") == [
        ("identifier", "shift"),
        ("operator", "&="),
        ("integer_literal", "63"),
        ("punctuator", ";"),
    ]


def test_tokenize_arrow_and_members():
    assert [t.text for t in tokenize("req->enqueued")] == ["req", "->", "enqueued"]


def test_tokenize_longest_match_operators():
    assert [t.text for t in tokenize("a <<= b >> c >= d")] == [
        "a", "<<=", "b", ">>", "c", ">=", "d"]


def test_tokenize_literals():
    source = 'x = 0x1F + 1.5e-3 + \'\\n\' + "hi \\" there";'
    kinds = [t.kind for t in tokenize(source)]
    assert "integer_literal" in kinds
    assert "float_literal" in kinds
    assert "char_literal" in kinds
    assert "string_literal" in kinds


def test_tokenize_comments_and_positions():
    toks = tokenize("a /* multi\nline */ b // tail\nc")
    assert [t.text for t in toks] == ["a", "b", "c"]
    assert [t.line for t in toks] == [1, 2, 3]


def test_strip_directives_preserves_line_numbers():
    src = "#define X 1\nint a;\n#include <x.h> \\\n  continued\nint b;\n"
    stripped = strip_directives(src)
    assert stripped.count("\n") == src.count("\n")
    toks = tokenize(stripped)
    assert [t.text for t in toks if t.kind == "identifier"] == ["a", "b"]
    assert toks[-2].line == 5


@pytest.mark.parametrize("bad", ["@", '"unterminated', "'", "/* open", "''"])
def test_tokenize_rejects_illegal_input(bad):
    with pytest.raises(LexError):
        tokenize(bad)


# --- parser: pinned shapes --------------------------------------------------

def test_assignment_shape():
    ast = parse_source("void f(void) { x = 7; }")
    assign = [n for n in ast.root.walk() if n.kind == "AssignExpr"]
    assert len(assign) == 1
    left, right = assign[0].children
    assert (left.kind, left.value) == ("NameExpr", "x")
    assert (right.kind, right.value) == ("IntegerLiteralExpr", "7")


def test_root_is_function_def_with_name_and_body():
    ast = parse_source("static int f(int a) { return a; }")
    assert ast.root.kind == "FunctionDef"
    kinds = [c.kind for c in ast.root.children]
    assert kinds == ["TypeName", "TypeName", "NameExpr", "Param", "Block"]
    assert ast.root.children[2].value == "f"


def test_scsi_abort_parses_with_expected_constructs():
    ast = parse_source(SCSI_ABORT)
    kinds = Counter(n.kind for n in ast.root.walk())
    assert kinds["IfStmt"] == 2
    # ->enqueued, ->io_canceled, and two arrows in each req->ops->cancel_io
    assert kinds["PtrMemberExpr"] == 6
    assert kinds["CallExpr"] == 5
    assert kinds["NotExpr"] == 1
    # the bare `return;` is a terminal carrying its own keyword
    bare = [n for n in ast.root.walk() if n.kind == "ReturnStmt"]
    assert len(bare) == 1 and bare[0].value == "return"


def test_shr_cc_parses_macro_declarator_and_casts():
    ast = parse_source(SHR_CC)
    name = ast.root.children[1]
    assert name.kind == "CallExpr"
    assert [(c.kind, c.value) for c in name.children] == [
        ("NameExpr", "HELPER"), ("NameExpr", "shr_cc")]
    kinds = Counter(n.kind for n in ast.root.walk())
    assert kinds["CastExpr"] == 1
    assert kinds["ShrExpr"] == 3
    assert kinds["ShlExpr"] == 1
    assert kinds["AndAssignExpr"] == 1
    assert kinds["CondExpr"] == 1
    # returned expression is the result variable
    ret = [n for n in ast.root.walk() if n.kind == "ReturnStmt"]
    assert len(ret) == 1
    assert (ret[0].children[0].kind, ret[0].children[0].value) == ("NameExpr", "result")


def test_cast_binds_tighter_than_shift():
    ast = parse_source("void f(void) { t = (uint64_t)val << 32; }")
    shl = next(n for n in ast.root.walk() if n.kind == "ShlExpr")
    assert shl.children[0].kind == "CastExpr"
    cast = shl.children[0]
    assert [c.kind for c in cast.children] == ["TypeName", "NameExpr"]


def test_parenthesized_expression_is_not_a_cast():
    ast = parse_source("int f(int a, int b) { return (a) * b + (a) - b; }")
    kinds = Counter(n.kind for n in ast.root.walk())
    assert kinds["CastExpr"] == 0
    assert kinds["MulExpr"] == 1


def test_statement_coverage():
    src = """
    int walk(int n, const char *tag) {
        int total = 0, limit = n * 2;
        unsigned counts[4] = {1, 2, 3};
        struct pair *p = 0;
        for (int i = 0; i < limit; i++) {
            total += i;
            if (total > 100) break;
            else continue;
        }
        while (n-- > 0)
            total ^= n;
        do {
            total--;
        } while (total & 1);
        switch (n % 3) {
        case 0:
            total = sizeof(int);
            break;
        case 1:
        default:
            total = sizeof total;
        }
        if (tag && tag[0] == 'x')
            goto out;
        total = total > 0 ? total : -total;
    out:
        return total;
    }
    """
    ast = parse_source(src)
    kinds = Counter(n.kind for n in ast.root.walk())
    for expected in ("ForStmt", "WhileStmt", "DoWhileStmt", "SwitchStmt", "CaseStmt",
                     "DefaultStmt", "BreakStmt", "ContinueStmt", "GotoStmt", "LabelStmt",
                     "InitListExpr", "ArrayDecl", "SizeofExpr", "CondExpr", "IndexExpr",
                     "PostIncExpr", "PostDecExpr", "NegExpr", "XorAssignExpr"):
        assert kinds[expected] >= 1, f"missing {expected}"
    assert kinds["SizeofExpr"] == 2
    validate_node(ast.root)


def test_empty_statement_and_empty_block():
    ast = parse_source("void f(void) { ; { } }")
    kinds = [n.kind for n in ast.root.walk()]
    assert kinds.count("EmptyStmt") == 2  # the `;` plus the filler in `{ }`
    validate_node(ast.root)


def test_identifier_preservation():
    for src in (SCSI_ABORT, SHR_CC):
        ast = parse_source(src)
        idents = Counter(t.text for t in tokenize(src) if t.kind == "identifier")
        values = Counter(t.value for t in ast.terminals())
        assert not (idents - values), f"lost identifiers: {dict(idents - values)}"


def test_parse_is_deterministic():
    first = parse_source(SHR_CC).to_json()
    second = parse_source(SHR_CC).to_json()
    assert first == second


def test_every_produced_kind_is_published():
    for src in (SCSI_ABORT, SHR_CC):
        for node in parse_source(src).root.walk():
            assert node.kind in NODE_KINDS


# --- parser: rejected input -------------------------------------------------

def test_empty_body_is_unsupported():
    with pytest.raises(ParseUnsupported):
        parse_source("void f(void) { }")


def test_aggregate_definition_is_unsupported():
    with pytest.raises(ParseUnsupported):
        parse_source("void f(void) { struct s { int a; } v; }")


@pytest.mark.parametrize("src", [
    "int x;",                      # no body
    "int f( { }",                  # header never closes
    "void f(void) { if (x }",      # malformed statement
    "void f(void) { x = ; }",      # missing operand
    ") { }",                       # no declarator at all
])
def test_malformed_input_is_a_parse_error(src):
    with pytest.raises(ParseError):
        parse_source(src)


# --- JSON round trip ---------------------------------------------------------

def test_json_round_trip():
    ast = parse_source(SHR_CC)
    clone = ast_from_json(ast.to_json())
    assert clone.to_json() == ast.to_json()


def test_node_from_json_validation():
    with pytest.raises(ParseError):
        node_from_json({"kind": "X"})  # neither value nor children
    with pytest.raises(ParseError):
        node_from_json({"kind": "X", "value": "a", "children": [{"kind": "Y", "value": "b"}]})
    with pytest.raises(ParseError):
        node_from_json({"kind": "", "value": "a"})
    with pytest.raises(ParseError):
        node_from_json({"kind": "X", "children": []})
    with pytest.raises(ParseError):
        ast_from_json({"kind": "Block", "children": [{"kind": "NameExpr", "value": "x"}]})


def test_validate_node_catches_broken_trees():
    with pytest.raises(ParseError):
        validate_node(AstNode("Block"))  # non-terminal without children or value
    with pytest.raises(ParseError):
        validate_node(AstNode("Block", value="x",
                              children=[AstNode("NameExpr", value="y")]))


# --- splitting files into functions ------------------------------------------

def test_split_functions_finds_definitions_and_skips_declarations():
    source = """
    struct pair { int a; int b; };
    int global_counter;
    static int first(int a) { return a + 1; }
    int second(void);
    int second(void) { return first(2); }
    """
    spans = split_functions(tokenize(source))
    assert len(spans) == 2
    from pathvuln.evaluation import function_name

    assert [function_name(parse_function(span)) for span in spans] == ["first", "second"]
