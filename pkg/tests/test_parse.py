from __future__ import annotations

import pytest

from vlf.errors import EncodingError, UnknownLanguage
from vlf.uast import (
    Language,
    UniversalCategory,
    detect_language,
    node_at,
    parse_to_uast,
    query_by_category,
    validate_schema,
)


class TestDetectLanguage:
    def test_extension_table(self):
        assert detect_language("a/b/Foo.java") is Language.JAVA
        assert detect_language("x.py") is Language.PYTHON
        for ext in ("cpp", "cc", "cxx", "hpp", "h"):
            assert detect_language(f"m.{ext}") is Language.CPP

    def test_unknown_extension(self):
        with pytest.raises(UnknownLanguage):
            detect_language("readme.md")


class TestPythonParse:
    def test_single_function(self):
        doc = parse_to_uast(b"def f():\n    pass\n", Language.PYTHON)
        root_kids = [node_at(doc, i) for i in doc.root.children]
        funcs = [n for n in root_kids if n.universal_category is UniversalCategory.FUNCTION_DECLARATION]
        assert len(funcs) == 1
        assert not doc.has_errors

    def test_empty_input(self):
        doc = parse_to_uast(b"", Language.PYTHON)
        assert doc.node_count == 1
        assert not doc.has_errors
        assert doc.root.parent is None

    def test_error_recovery(self):
        doc = parse_to_uast(b"def f(:", Language.PYTHON)
        assert doc.has_errors
        assert validate_schema(doc).ok  # still schema-valid

    def test_broken_line_does_not_poison_rest(self):
        src = b"x = = 1\ny = 2\n"
        doc = parse_to_uast(src, Language.PYTHON)
        assert doc.has_errors
        assigns = query_by_category(doc, UniversalCategory.VARIABLE_ASSIGNMENT)
        assert len(assigns) >= 1  # y = 2 still parses

    def test_non_utf8_rejected(self):
        with pytest.raises(EncodingError):
            parse_to_uast(b"\xff\xfe broken", Language.PYTHON)

    def test_two_functions_query(self):
        src = b"def a():\n    return 1\n\ndef b():\n    return 2\n"
        doc = parse_to_uast(src, Language.PYTHON)
        assert len(query_by_category(doc, UniversalCategory.FUNCTION_DECLARATION)) == 2

    def test_entry_point_role(self):
        src = b'if __name__ == "__main__":\n    pass\n'
        doc = parse_to_uast(src, Language.PYTHON)
        roles = [n.semantic_role for n in doc.nodes if n.semantic_role]
        assert "ENTRY_POINT" in roles

    def test_with_statement_scoped_resource(self):
        src = b'with open("x") as fh:\n    fh.read()\n'
        doc = parse_to_uast(src, Language.PYTHON)
        nodes = [n for n in doc.nodes if n.semantic_role == "SCOPED_RESOURCE"]
        assert len(nodes) == 1
        assert nodes[0].native_type == "with_statement"


class TestJavaParse:
    def test_method_and_main_role(self):
        src = b"""
public class A {
    public static void main(String[] args) {
        int x = 1;
        System.out.println(x);
    }
}
"""
        doc = parse_to_uast(src, Language.JAVA)
        assert not doc.has_errors
        assert len(query_by_category(doc, UniversalCategory.FUNCTION_DECLARATION)) == 1
        assert any(n.semantic_role == "ENTRY_POINT" for n in doc.nodes)

    def test_try_with_resources(self):
        src = b"""
public class A {
    void f() throws Exception {
        try (AutoCloseable c = open()) {
            c.toString();
        }
    }
}
"""
        doc = parse_to_uast(src, Language.JAVA)
        assert not doc.has_errors
        twr = [n for n in doc.nodes if n.native_type == "try_with_resources_statement"]
        assert len(twr) == 1
        assert twr[0].semantic_role == "SCOPED_RESOURCE"

    def test_error_recovery(self):
        doc = parse_to_uast(b"public class A { void f( }", Language.JAVA)
        assert doc.has_errors
        assert validate_schema(doc).ok


class TestCppParse:
    def test_functions_and_includes(self):
        src = b"""
#include <cstdio>

int add(int a, int b) {
    return a + b;
}

int main() {
    printf("%d", add(1, 2));
    return 0;
}
"""
        doc = parse_to_uast(src, Language.CPP)
        assert not doc.has_errors
        assert len(query_by_category(doc, UniversalCategory.FUNCTION_DECLARATION)) == 2
        assert len(query_by_category(doc, UniversalCategory.IMPORT)) == 1

    def test_raii_role(self):
        src = b"""
#include <mutex>

void f(std::mutex &m) {
    std::lock_guard<std::mutex> guard(m);
}
"""
        doc = parse_to_uast(src, Language.CPP)
        assert any(n.semantic_role == "SCOPED_RESOURCE" for n in doc.nodes)

    def test_error_recovery(self):
        doc = parse_to_uast(b"int f( { return; }", Language.CPP)
        assert doc.has_errors
        assert validate_schema(doc).ok


class TestStructuralInvariants:
    def test_corpus_documents_are_schema_valid(self, corpus_docs):
        for sample, doc in corpus_docs:
            report = validate_schema(doc)
            assert report.ok, f"{sample.name}: {report.violations[:3]}"

    def test_partition_property(self, corpus_docs):
        for _, doc in corpus_docs:
            total = sum(len(ix) for ix in doc.category_index.values())
            assert total == doc.node_count
            union = sorted(i for ix in doc.category_index.values() for i in ix)
            assert union == list(range(doc.node_count))

    def test_span_containment(self, corpus_docs):
        for _, doc in corpus_docs:
            for node in doc.nodes:
                if node.parent is not None:
                    assert doc.nodes[node.parent].span.contains(node.span)

    def test_children_ordered_by_start_byte(self, corpus_docs):
        for _, doc in corpus_docs:
            for node in doc.nodes:
                starts = [doc.nodes[c].span.start_byte for c in node.children]
                assert starts == sorted(starts)

    def test_determinism(self, corpus_samples):
        for sample in corpus_samples[:12]:
            a = parse_to_uast(sample.source.encode(), sample.language)
            b = parse_to_uast(sample.source.encode(), sample.language)
            assert a == b


class TestNodeAt:
    def test_root_and_bounds(self):
        doc = parse_to_uast(b"x = 1\n", Language.PYTHON)
        assert node_at(doc, 0).parent is None
        assert node_at(doc, doc.node_count - 1).index == doc.node_count - 1
        with pytest.raises(IndexError):
            node_at(doc, doc.node_count)
        with pytest.raises(IndexError):
            node_at(doc, -1)
