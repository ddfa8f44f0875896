#include <doctest.h>

#include "stylo/binder.hpp"
#include "stylo/parser.hpp"

using namespace stylo;

namespace {

BindErrorKind kind_of(const char* src) {
    try {
        bind(parse_source(src));
    } catch (const BindError& e) {
        return e.kind();
    }
    FAIL("expected BindError for: " << src);
    return BindErrorKind::Other;
}

}  // namespace

TEST_CASE("binding failures") {
    CHECK(kind_of("int main(){int a; int a; return 0;}") == BindErrorKind::RedeclaredVariable);
    CHECK(kind_of("int main(){y=2; return 0;}") == BindErrorKind::UndeclaredVariable);
    CHECK(kind_of("int main(){return g(1);}") == BindErrorKind::UndeclaredVariable);
    CHECK(kind_of("void f(){return 1;} int main(){return 0;}") == BindErrorKind::ReturnStatement);
    CHECK(kind_of("int f(){return;} int main(){return 0;}") == BindErrorKind::ReturnStatement);
    CHECK(kind_of("int main(){int x; x.push_front(1); return 0;}") == BindErrorKind::Other);
}

TEST_CASE("shadowing in an inner scope is allowed") {
    Bindings b = bind(parse_source("int main(){int a=1; {int a=2; a++;} for(int i=0;i<2;i++){int a=i;} return a;}"));
    int count = 0;
    for (const auto* d : b.variables()) count += d->name == "a";
    CHECK(count == 3);
}

TEST_CASE("uses resolve to the innermost declaration") {
    Ast ast = parse_source("int main(){int a=1; {int a=2; a++;} return a;}");
    Bindings b = bind(ast);
    auto vars = b.variables();
    REQUIRE(vars.size() == 2);
    REQUIRE(vars[0]->uses.size() == 1);
    REQUIRE(vars[1]->uses.size() == 1);
    CHECK(vars[1]->uses[0] < vars[0]->uses[0]);
}

TEST_CASE("static types") {
    Ast ast = parse_source(
        "typedef long long ll; int main(){ll a=1; double d=2; string s=\"x\"; vector<int> v; char c='c'; "
        "a+d; s+c; v[0]; s[0]; a<d; v.size(); (int)d; return 0;}");
    Bindings b = bind(ast);
    const Node& body = ast.root.children.back().children.back();
    auto type_at = [&](int stmt) {
        NodePath p = {1, 0, stmt, 0};
        return b.type_of(ast.root, body.children[stmt].children[0], p);
    };
    CHECK(type_at(5).base == "double");
    CHECK(type_at(6).base == "string");
    CHECK(type_at(7).base == "int");
    CHECK(type_at(8).base == "char");
    CHECK(type_at(9).base == "bool");
    CHECK(type_at(10).base == "long long");
    CHECK(type_at(11).base == "int");
    CHECK(b.resolve_type("vector<ll>") == "vector<long long>");
    CHECK(b.resolve_type("const ll") == "long long");
}

TEST_CASE("functions must precede their callers") {
    CHECK(kind_of("int main(){return f();} int f(){return 1;}") == BindErrorKind::UndeclaredVariable);
    CHECK_NOTHROW(bind(parse_source("int f(int n){return n?f(n-1):0;} int main(){return f(3);}")));
}
