"""Recursive-descent parser building rooted ASTs for single C functions.

The grammar is a pragmatic C subset: function definitions, declarations
with initializers, the usual statement forms, and full expression syntax
with per-operator node kinds. Pointer/type syntax is kept as flat
TypeName terminals rather than parsed structure. Constructs outside the
subset raise ParseUnsupported so callers can skip the sample.

Node kinds are a published contract: path strings hash over them, so any
rename is a format version bump (see PATH_FORMAT_VERSION in paths.py).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ParseUnsupported
from .lexer import Token, tokenize

TYPE_KEYWORDS = frozenset(
    """
    void char short int long float double signed unsigned _Bool _Complex
    struct union enum const volatile static register extern inline auto
    typedef restrict _Atomic _Noreturn
    """.split()
)

_ASSIGN_OPS = {
    "=": "AssignExpr",
    "+=": "AddAssignExpr",
    "-=": "SubAssignExpr",
    "*=": "MulAssignExpr",
    "/=": "DivAssignExpr",
    "%=": "RemAssignExpr",
    "<<=": "ShlAssignExpr",
    ">>=": "ShrAssignExpr",
    "&=": "AndAssignExpr",
    "^=": "XorAssignExpr",
    "|=": "OrAssignExpr",
}

_BINARY_LEVELS = (
    {"||": "LogicalOrExpr"},
    {"&&": "LogicalAndExpr"},
    {"|": "BitOrExpr"},
    {"^": "BitXorExpr"},
    {"&": "BitAndExpr"},
    {"==": "EqExpr", "!=": "NeExpr"},
    {"<": "LtExpr", ">": "GtExpr", "<=": "LeExpr", ">=": "GeExpr"},
    {"<<": "ShlExpr", ">>": "ShrExpr"},
    {"+": "AddExpr", "-": "SubExpr"},
    {"*": "MulExpr", "/": "DivExpr", "%": "RemExpr"},
)

_PREFIX_OPS = {
    "!": "NotExpr",
    "~": "BitNotExpr",
    "-": "NegExpr",
    "+": "PlusExpr",
    "*": "DerefExpr",
    "&": "AddrOfExpr",
    "++": "PreIncExpr",
    "--": "PreDecExpr",
}

_LITERAL_KINDS = {
    "integer_literal": "IntegerLiteralExpr",
    "float_literal": "FloatLiteralExpr",
    "char_literal": "CharLiteralExpr",
    "string_literal": "StringLiteralExpr",
}

NODE_KINDS = tuple(
    sorted(
        {
            "FunctionDef", "Param", "Block", "DeclStmt", "InitDecl", "ArrayDecl",
            "FuncDecl", "ExprStmt", "IfStmt", "WhileStmt", "DoWhileStmt", "ForStmt",
            "SwitchStmt", "CaseStmt", "DefaultStmt", "ReturnStmt", "BreakStmt",
            "ContinueStmt", "GotoStmt", "LabelStmt", "EmptyStmt",
            "NameExpr", "TypeName", "Ellipsis",
            "IntegerLiteralExpr", "FloatLiteralExpr", "CharLiteralExpr",
            "StringLiteralExpr",
            "CondExpr", "CommaExpr", "CastExpr", "SizeofExpr", "CallExpr",
            "IndexExpr", "MemberExpr", "PtrMemberExpr", "InitListExpr",
            "PostIncExpr", "PostDecExpr",
        }
        | set(_ASSIGN_OPS.values())
        | {kind for level in _BINARY_LEVELS for kind in level.values()}
        | set(_PREFIX_OPS.values())
    )
)


@dataclass
class AstNode:
    """One AST node; terminal iff it has a value and no children."""

    kind: str
    value: str | None = None
    children: list["AstNode"] = field(default_factory=list)

    @property
    def is_terminal(self) -> bool:
        return not self.children

    def walk(self):
        """Preorder traversal."""
        yield self
        for child in self.children:
            yield from child.walk()

    def terminals(self) -> list["AstNode"]:
        return [n for n in self.walk() if n.is_terminal]

    def to_json(self) -> dict:
        if self.is_terminal:
            return {"kind": self.kind, "value": self.value}
        return {"kind": self.kind, "children": [c.to_json() for c in self.children]}


def validate_node(node: AstNode) -> None:
    """Enforce the terminal/value duality over the whole subtree."""
    for n in node.walk():
        if not n.kind or not isinstance(n.kind, str):
            raise ParseError(f"node kind must be a non-empty string, got {n.kind!r}")
        if n.is_terminal:
            if not n.value:
                raise ParseError(f"terminal {n.kind} node lacks a value")
        elif n.value is not None:
            raise ParseError(f"non-terminal {n.kind} node carries a value")


def node_from_json(obj) -> AstNode:
    """Rebuild a node tree from the documented JSON schema.

    Schema: terminal nodes are {"kind": str, "value": str}; interior nodes
    are {"kind": str, "children": [node, ...]} with at least one child.
    Kind names are free-form so external front-ends can supply trees.
    """
    if not isinstance(obj, dict):
        raise ParseError(f"AST node must be an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if not isinstance(kind, str) or not kind:
        raise ParseError("AST node lacks a 'kind' string")
    has_value = obj.get("value") is not None
    children = obj.get("children")
    if has_value and children:
        raise ParseError(f"{kind}: node cannot have both value and children")
    if has_value:
        if not isinstance(obj["value"], str) or not obj["value"]:
            raise ParseError(f"{kind}: terminal value must be non-empty text")
        return AstNode(kind, value=obj["value"])
    if not isinstance(children, list) or not children:
        raise ParseError(f"{kind}: interior node needs a non-empty children list")
    return AstNode(kind, children=[node_from_json(c) for c in children])


@dataclass
class Ast:
    """A parsed function: a rooted tree whose root is a FunctionDef."""

    root: AstNode

    def terminals(self) -> list[AstNode]:
        return self.root.terminals()

    def to_json(self) -> dict:
        return self.root.to_json()


def ast_from_json(obj) -> Ast:
    root = node_from_json(obj)
    if root.kind != "FunctionDef":
        raise ParseError(f"root must be FunctionDef, got {root.kind}")
    validate_node(root)
    return Ast(root)


def _match_forward(tokens, start: int) -> int:
    """Index of the token closing the group opened at tokens[start]."""
    pairs = {"(": ")", "{": "}", "[": "]"}
    closer = pairs[tokens[start].text]
    depth = 0
    for i in range(start, len(tokens)):
        t = tokens[i].text
        if t in pairs:
            depth += 1
        elif t in (")", "}", "]"):
            depth -= 1
            if depth == 0:
                if t != closer:
                    raise ParseError("mismatched bracket", tokens[i].line, tokens[i].column)
                return i
    raise ParseError("unbalanced bracket", tokens[start].line, tokens[start].column)


def _match_backward(tokens, end: int) -> int:
    """Index of the '(' matching the ')' at tokens[end]."""
    depth = 0
    for i in range(end, -1, -1):
        t = tokens[i].text
        if t == ")":
            depth += 1
        elif t == "(":
            depth -= 1
            if depth == 0:
                return i
    raise ParseError("unbalanced ')'", tokens[end].line, tokens[end].column)


def _strip_attributes(tokens: list[Token]) -> list[Token]:
    """Drop GCC attribute/extension markers, which the grammar ignores."""
    out = []
    i = 0
    while i < len(tokens):
        t = tokens[i]
        if t.kind == "identifier" and t.text in ("__attribute__", "__declspec"):
            i += 1
            if i < len(tokens) and tokens[i].text == "(":
                i = _match_forward(tokens, i) + 1
            continue
        if t.kind == "identifier" and t.text in ("__extension__", "__restrict", "__restrict__", "__inline", "__inline__"):
            i += 1
            continue
        out.append(t)
        i += 1
    return out


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token stream helpers -------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.text == text

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {text!r}, found end of input")
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def fail(self, message, unsupported=False):
        tok = self.peek()
        cls = ParseUnsupported if unsupported else ParseError
        if tok is None:
            raise cls(message)
        raise cls(message, tok.line, tok.column)

    # --- expressions ----------------------------------------------------

    def parse_expr(self) -> AstNode:
        """Full expression, comma operator included."""
        first = self.parse_assign()
        if not self.at(","):
            return first
        items = [first]
        while self.at(","):
            self.take()
            items.append(self.parse_assign())
        return AstNode("CommaExpr", children=items)

    def parse_assign(self) -> AstNode:
        left = self.parse_conditional()
        tok = self.peek()
        if tok is not None and tok.text in _ASSIGN_OPS:
            self.take()
            right = self.parse_assign()
            return AstNode(_ASSIGN_OPS[tok.text], children=[left, right])
        return left

    def parse_conditional(self) -> AstNode:
        cond = self.parse_binary(0)
        if not self.at("?"):
            return cond
        self.take()
        then = self.parse_expr()
        self.expect(":")
        otherwise = self.parse_conditional()
        return AstNode("CondExpr", children=[cond, then, otherwise])

    def parse_binary(self, level: int) -> AstNode:
        if level == len(_BINARY_LEVELS):
            return self.parse_cast()
        ops = _BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.text not in ops:
                return left
            self.take()
            right = self.parse_binary(level + 1)
            left = AstNode(ops[tok.text], children=[left, right])

    def _type_group(self) -> tuple[list[Token], int] | None:
        """When positioned at '(', check whether the parens hold a type.

        Returns (name tokens, star count) for shapes like `(unsigned long)`,
        `(struct foo *)`, or `(uint64_t)`; None for anything that must be an
        expression (operators, literals, or an identifier after a '*').
        """
        close = _match_forward(self.tokens, self.pos)
        inner = self.tokens[self.pos + 1 : close]
        if not inner:
            return None
        names: list[Token] = []
        stars = 0
        for t in inner:
            if t.kind == "keyword" and t.text in TYPE_KEYWORDS:
                if stars and t.text not in ("const", "volatile"):
                    return None
                names.append(t)
            elif t.kind == "identifier":
                if stars:
                    return None  # identifier after '*': expression, not a type
                names.append(t)
            elif t.text == "*":
                stars += 1
            else:
                return None
        if not names:
            return None
        return names, stars

    def _cast_type_tokens(self) -> list[Token] | None:
        """When positioned at '(', detect a cast and return its type tokens."""
        group = self._type_group()
        if group is None:
            return None
        names, stars = group
        close = _match_forward(self.tokens, self.pos)
        after = self.tokens[close + 1] if close + 1 < len(self.tokens) else None
        if after is None:
            return None
        has_type_kw = any(t.kind == "keyword" for t in names)
        if has_type_kw or stars:
            if after.kind in ("identifier", "keyword", *_LITERAL_KINDS) or after.text in ("(", "*", "&", "~", "!", "-", "+", "++", "--"):
                return names
            return None
        # Bare identifiers only: treat as a cast when directly applied to an
        # operand token; '(name)(...)' stays a call.
        if len(names) == 1 and after.kind in ("identifier", *_LITERAL_KINDS):
            return names
        return None

    def parse_cast(self) -> AstNode:
        if self.at("(") and self.peek().kind == "punctuator":
            type_tokens = self._cast_type_tokens()
            if type_tokens is not None:
                close = _match_forward(self.tokens, self.pos)
                self.pos = close + 1
                children = [AstNode("TypeName", value=t.text) for t in type_tokens]
                children.append(self.parse_cast())
                return AstNode("CastExpr", children=children)
        return self.parse_unary()

    def parse_unary(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected expression, found end of input")
        if tok.text in _PREFIX_OPS and tok.kind == "operator":
            self.take()
            return AstNode(_PREFIX_OPS[tok.text], children=[self.parse_cast()])
        if tok.text == "sizeof":
            self.take()
            if self.at("("):
                group = self._type_group()
                # unlike a cast, sizeof(type) has no operand after the parens
                if group is not None:
                    names, stars = group
                    if stars or len(names) == 1 or any(t.kind == "keyword" for t in names):
                        close = _match_forward(self.tokens, self.pos)
                        self.pos = close + 1
                        return AstNode(
                            "SizeofExpr",
                            children=[AstNode("TypeName", value=t.text) for t in names],
                        )
            return AstNode("SizeofExpr", children=[self.parse_unary()])
        return self.parse_postfix()

    def parse_postfix(self) -> AstNode:
        node = self.parse_primary()
        while True:
            if self.at("("):
                close = _match_forward(self.tokens, self.pos)
                self.take()
                args = []
                while self.pos < close:
                    args.append(self.parse_assign())
                    if self.pos < close:
                        self.expect(",")
                self.expect(")")
                node = AstNode("CallExpr", children=[node, *args])
            elif self.at("["):
                self.take()
                index = self.parse_expr()
                self.expect("]")
                node = AstNode("IndexExpr", children=[node, index])
            elif self.at(".") or self.at("->"):
                op = self.take()
                member = self.take()
                if member.kind != "identifier":
                    raise ParseError("expected member name", member.line, member.column)
                kind = "MemberExpr" if op.text == "." else "PtrMemberExpr"
                node = AstNode(kind, children=[node, AstNode("NameExpr", value=member.text)])
            elif self.at("++"):
                self.take()
                node = AstNode("PostIncExpr", children=[node])
            elif self.at("--"):
                self.take()
                node = AstNode("PostDecExpr", children=[node])
            else:
                return node

    def parse_primary(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected expression, found end of input")
        if tok.kind == "identifier":
            self.take()
            return AstNode("NameExpr", value=tok.text)
        if tok.kind in _LITERAL_KINDS:
            self.take()
            if tok.kind == "string_literal":
                # adjacent string literals concatenate into one node
                parts = [tok.text]
                while self.peek() is not None and self.peek().kind == "string_literal":
                    parts.append(self.take().text)
                return AstNode("StringLiteralExpr", value="".join(parts))
            return AstNode(_LITERAL_KINDS[tok.kind], value=tok.text)
        if tok.text == "(":
            self.take()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        self.fail(f"unexpected token {tok.text!r} in expression")

    # --- declarations ----------------------------------------------------

    def starts_declaration(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
            return True
        if tok.kind != "identifier":
            return False
        nxt = self.peek(1)
        if nxt is not None and nxt.kind == "identifier":
            return True
        j = 1
        while self.at("*", j):
            j += 1
        if j > 1:
            name = self.peek(j)
            stop = self.peek(j + 1)
            if (
                name is not None
                and name.kind == "identifier"
                and stop is not None
                and stop.text in ("=", ";", ",", "[")
            ):
                return True
        return False

    def _take_specifiers(self) -> list[AstNode]:
        """Consume type specifiers, returning one TypeName terminal per token."""
        specs: list[AstNode] = []
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
                if tok.text in ("struct", "union", "enum"):
                    tag = self.peek(1)
                    body_at = 2 if (tag is not None and tag.kind == "identifier") else 1
                    if self.at("{", body_at):
                        self.fail("aggregate definition in declaration", unsupported=True)
                self.take()
                specs.append(AstNode("TypeName", value=tok.text))
                continue
            if tok.kind == "identifier":
                j = 1
                while self.at("*", j):
                    j += 1
                lookahead = self.peek(j)
                if lookahead is not None and lookahead.kind == "identifier":
                    self.take()
                    specs.append(AstNode("TypeName", value=tok.text))
                    continue
            break
        return specs

    def _skip_stars(self):
        while True:
            tok = self.peek()
            if tok is not None and (tok.text == "*" or tok.text in ("const", "volatile")):
                self.take()
            else:
                return

    def _parse_declarator(self) -> AstNode:
        self._skip_stars()
        if self.at("("):
            # function-pointer declarator: ( '*'+ name )
            self.take()
            if not self.at("*"):
                self.fail("unsupported parenthesized declarator", unsupported=True)
            self._skip_stars()
            name = self.take()
            if name.kind != "identifier":
                self.fail("unsupported declarator", unsupported=True)
            self.expect(")")
            node: AstNode = AstNode("NameExpr", value=name.text)
        else:
            name = self.take()
            if name.kind != "identifier":
                raise ParseError(
                    f"expected declarator name, found {name.text!r}", name.line, name.column
                )
            node = AstNode("NameExpr", value=name.text)
        while True:
            if self.at("["):
                self.take()
                if self.at("]"):
                    self.take()
                    node = AstNode("ArrayDecl", children=[node])
                else:
                    size = self.parse_expr()
                    self.expect("]")
                    node = AstNode("ArrayDecl", children=[node, size])
            elif self.at("("):
                close = _match_forward(self.tokens, self.pos)
                params = _parse_param_group(self.tokens[self.pos + 1 : close])
                self.pos = close + 1
                node = AstNode("FuncDecl", children=[node, *params])
            else:
                return node

    def parse_initializer(self) -> AstNode:
        if not self.at("{"):
            return self.parse_assign()
        self.take()
        items: list[AstNode] = []
        while not self.at("}"):
            if self.at(".") and self.peek(1) is not None and self.peek(1).kind == "identifier":
                self.take()
                fld = self.take()
                self.expect("=")
                items.append(
                    AstNode(
                        "AssignExpr",
                        children=[AstNode("NameExpr", value=fld.text), self.parse_initializer()],
                    )
                )
            elif self.at("["):
                self.fail("array designator in initializer", unsupported=True)
            else:
                items.append(self.parse_initializer())
            if self.at(","):
                self.take()
            elif not self.at("}"):
                self.fail("expected ',' or '}' in initializer")
        self.take()
        if not items:
            items.append(AstNode("EmptyStmt", value=";"))
        return AstNode("InitListExpr", children=items)

    def parse_declaration(self) -> AstNode:
        specs = self._take_specifiers()
        if not specs:
            self.fail("expected declaration specifiers")
        declarators: list[AstNode] = []
        while True:
            node = self._parse_declarator()
            if self.at("="):
                self.take()
                node = AstNode("InitDecl", children=[node, self.parse_initializer()])
            declarators.append(node)
            if self.at(","):
                self.take()
                continue
            break
        self.expect(";")
        return AstNode("DeclStmt", children=[*specs, *declarators])

    # --- statements -------------------------------------------------------

    def parse_statement(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected statement, found end of input")
        if tok.text == "{":
            return self.parse_block()
        if tok.text == ";":
            self.take()
            return AstNode("EmptyStmt", value=";")
        if tok.kind == "keyword":
            handler = getattr(self, f"_parse_{tok.text}_stmt", None)
            if handler is not None:
                return handler()
        if tok.kind == "identifier" and self.at(":", 1):
            self.take()
            self.take()
            body = self.parse_statement()
            return AstNode("LabelStmt", children=[AstNode("NameExpr", value=tok.text), body])
        if self.starts_declaration():
            return self.parse_declaration()
        expr = self.parse_expr()
        self.expect(";")
        return AstNode("ExprStmt", children=[expr])

    def _parse_block_stmts(self) -> list[AstNode]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.peek() is None:
                raise ParseError("unterminated block")
            stmts.append(self.parse_statement())
        self.take()
        return stmts

    def parse_block(self) -> AstNode:
        stmts = self._parse_block_stmts()
        if not stmts:
            stmts = [AstNode("EmptyStmt", value=";")]
        return AstNode("Block", children=stmts)

    def _parse_if_stmt(self) -> AstNode:
        self.take()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_statement()
        children = [cond, then]
        if self.at("else"):
            self.take()
            children.append(self.parse_statement())
        return AstNode("IfStmt", children=children)

    def _parse_while_stmt(self) -> AstNode:
        self.take()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        return AstNode("WhileStmt", children=[cond, self.parse_statement()])

    def _parse_do_stmt(self) -> AstNode:
        self.take()
        body = self.parse_statement()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return AstNode("DoWhileStmt", children=[body, cond])

    def _parse_for_stmt(self) -> AstNode:
        self.take()
        self.expect("(")
        children = []
        if self.at(";"):
            self.take()
        elif self.starts_declaration():
            children.append(self.parse_declaration())
        else:
            children.append(self.parse_expr())
            self.expect(";")
        if not self.at(";"):
            children.append(self.parse_expr())
        self.expect(";")
        if not self.at(")"):
            children.append(self.parse_expr())
        self.expect(")")
        children.append(self.parse_statement())
        return AstNode("ForStmt", children=children)

    def _parse_switch_stmt(self) -> AstNode:
        self.take()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect("{")
        members: list[AstNode] = [cond]
        current: AstNode | None = None
        while not self.at("}"):
            if self.peek() is None:
                raise ParseError("unterminated switch body")
            if self.at("case"):
                self.take()
                label = self.parse_conditional()
                self.expect(":")
                current = AstNode("CaseStmt", children=[label])
                members.append(current)
            elif self.at("default"):
                self.take()
                self.expect(":")
                current = AstNode("DefaultStmt", children=[])
                members.append(current)
            else:
                stmt = self.parse_statement()
                (current.children if current is not None else members).append(stmt)
        self.take()
        for member in members[1:]:
            if member.kind == "DefaultStmt" and not member.children:
                member.children.append(AstNode("EmptyStmt", value=";"))
        return AstNode("SwitchStmt", children=members)

    def _parse_return_stmt(self) -> AstNode:
        self.take()
        if self.at(";"):
            self.take()
            return AstNode("ReturnStmt", value="return")
        expr = self.parse_expr()
        self.expect(";")
        return AstNode("ReturnStmt", children=[expr])

    def _parse_break_stmt(self) -> AstNode:
        self.take()
        self.expect(";")
        return AstNode("BreakStmt", value="break")

    def _parse_continue_stmt(self) -> AstNode:
        self.take()
        self.expect(";")
        return AstNode("ContinueStmt", value="continue")

    def _parse_goto_stmt(self) -> AstNode:
        self.take()
        label = self.take()
        if label.kind != "identifier":
            raise ParseError("expected label after goto", label.line, label.column)
        self.expect(";")
        return AstNode("GotoStmt", children=[AstNode("NameExpr", value=label.text)])


def _parse_param_group(tokens: list[Token]) -> list[AstNode]:
    """Parse a parameter list (the tokens between the parens)."""
    if not tokens:
        return []
    if len(tokens) == 1 and tokens[0].text == "void":
        return []
    groups: list[list[Token]] = [[]]
    depth = 0
    for tok in tokens:
        if tok.text in ("(", "[", "{"):
            depth += 1
        elif tok.text in (")", "]", "}"):
            depth -= 1
        if tok.text == "," and depth == 0:
            groups.append([])
        else:
            groups[-1].append(tok)
    return [_parse_param(g) for g in groups]


def _parse_param(tokens: list[Token]) -> AstNode:
    if not tokens:
        raise ParseError("empty parameter")
    if len(tokens) == 1 and tokens[0].text == "...":
        return AstNode("Ellipsis", value="...")
    children: list[AstNode] = []
    name: str | None = None
    extra: list[AstNode] = []
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.text == "*":
            i += 1
            continue
        if tok.kind == "keyword" and tok.text in TYPE_KEYWORDS:
            children.append(AstNode("TypeName", value=tok.text))
            i += 1
            continue
        if tok.kind == "identifier":
            nxt = tokens[i + 1] if i + 1 < n else None
            if nxt is not None and (nxt.kind == "identifier" or nxt.text == "*"):
                children.append(AstNode("TypeName", value=tok.text))
                i += 1
                continue
            name = tok.text
            i += 1
            continue
        if tok.text == "(":
            close = _match_forward(tokens, i)
            inner = tokens[i + 1 : close]
            if name is None and inner and inner[0].text == "*":
                # function-pointer parameter: name sits inside the parens
                idents = [t for t in inner if t.kind == "identifier"]
                if not idents:
                    raise ParseUnsupported("unnamed function-pointer parameter",
                                           tok.line, tok.column)
                name = idents[-1].text
            else:
                extra.extend(_parse_param_group(inner))
            i = close + 1
            continue
        if tok.text == "[":
            close = _match_forward(tokens, i)
            inner = tokens[i + 1 : close]
            if inner:
                sub = _Parser(inner)
                extra.append(sub.parse_expr())
            i = close + 1
            continue
        raise ParseUnsupported(f"unsupported parameter syntax near {tok.text!r}",
                               tok.line, tok.column)
    if name is not None:
        children.append(AstNode("NameExpr", value=name))
    children.extend(extra)
    if not children:
        raise ParseError("unparsable parameter", tokens[0].line, tokens[0].column)
    return AstNode("Param", children=children)


def parse_function(tokens: list[Token]) -> Ast:
    """Parse one complete function definition into an Ast.

    Raises ParseUnsupported when the input uses a construct outside the
    supported subset (including an empty body), ParseError when the token
    stream is not a function definition at all.
    """
    tokens = _strip_attributes(tokens)
    if not tokens:
        raise ParseError("empty input")
    body_open = None
    depth = 0
    for i, tok in enumerate(tokens):
        if tok.text in ("(", "["):
            depth += 1
        elif tok.text in (")", "]"):
            depth -= 1
        elif tok.text == "{" and depth == 0:
            body_open = i
            break
    if body_open is None:
        raise ParseError("no function body found", tokens[0].line, tokens[0].column)
    prefix = tokens[:body_open]
    if not prefix or prefix[-1].text != ")":
        raise ParseError("malformed function header", tokens[body_open].line,
                         tokens[body_open].column)
    params_open = _match_backward(prefix, len(prefix) - 1)
    decl_part = prefix[:params_open]
    if not decl_part:
        raise ParseError("missing function name", prefix[0].line, prefix[0].column)

    if decl_part[-1].kind == "identifier":
        name_node = AstNode("NameExpr", value=decl_part[-1].text)
        spec_tokens = decl_part[:-1]
    elif decl_part[-1].text == ")":
        macro_open = _match_backward(decl_part, len(decl_part) - 1)
        if macro_open == 0 or decl_part[macro_open - 1].kind != "identifier":
            raise ParseUnsupported("unsupported function declarator",
                                   decl_part[-1].line, decl_part[-1].column)
        macro = decl_part[macro_open - 1]
        inner = decl_part[macro_open + 1 : -1]
        args = []
        if inner:
            sub = _Parser(inner)
            args.append(sub.parse_assign())
            while sub.at(","):
                sub.take()
                args.append(sub.parse_assign())
            if sub.peek() is not None:
                raise ParseUnsupported("unsupported macro declarator",
                                       macro.line, macro.column)
        name_node = AstNode("CallExpr", children=[AstNode("NameExpr", value=macro.text), *args])
        spec_tokens = decl_part[: macro_open - 1]
    else:
        raise ParseUnsupported("unsupported function declarator",
                               decl_part[-1].line, decl_part[-1].column)

    specs = []
    for tok in spec_tokens:
        if tok.text == "*":
            continue
        if tok.kind in ("keyword", "identifier"):
            specs.append(AstNode("TypeName", value=tok.text))
        else:
            raise ParseUnsupported(f"unsupported token {tok.text!r} in function header",
                                   tok.line, tok.column)

    params = _parse_param_group(prefix[params_open + 1 : -1])

    body_parser = _Parser(tokens[body_open:])
    stmts = body_parser._parse_block_stmts()
    while body_parser.at(";"):
        body_parser.take()
    if body_parser.peek() is not None:
        tok = body_parser.peek()
        raise ParseError(f"trailing tokens after function body ({tok.text!r})",
                         tok.line, tok.column)
    if not stmts:
        raise ParseUnsupported("empty function body", tokens[body_open].line,
                               tokens[body_open].column)
    body = AstNode("Block", children=stmts)

    root = AstNode("FunctionDef", children=[*specs, name_node, *params, body])
    validate_node(root)
    return Ast(root)


def parse_source(source: str) -> Ast:
    """Tokenize and parse a single function definition."""
    return parse_function(tokenize(source))


def split_functions(tokens: list[Token]) -> list[list[Token]]:
    """Split a file's token stream into candidate function-definition spans.

    Candidates are top-level brace groups whose header ends with a ')'.
    Top-level declarations and stray semicolons between them are ignored.
    """
    spans = []
    pending_start = 0
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        if tok.text == ";" :
            pending_start = i + 1
            i += 1
            continue
        if tok.text in ("(", "["):
            i = _match_forward(tokens, i) + 1
            continue
        if tok.text == "{":
            close = _match_forward(tokens, i)
            header = tokens[pending_start:i]
            if header and header[-1].text == ")":
                spans.append(tokens[pending_start : close + 1])
            pending_start = close + 1
            i = close + 1
            continue
        i += 1
    return spans
