#include <doctest.h>

#include "stylo/interp.hpp"
#include "stylo/parser.hpp"

using namespace stylo;

namespace {

ExecutionResult run(const std::string& src, const std::string& input = "", ExecLimits limits = {}) {
    return execute(parse_source(src), input, limits);
}

const char* kHeader = "#include <bits/stdc++.h>\nusing namespace std;\n";

std::string prog(const std::string& body) { return std::string(kHeader) + body; }

}  // namespace

TEST_CASE("sum of two integers") {
    auto r = run(prog("int main(){int a,b; cin>>a>>b; cout<<a+b<<endl; return 0;}"), "2 3");
    CHECK(r.ok());
    CHECK(r.stdout_text == "5\n");
    CHECK(r.input_values == 2);
    CHECK(r.input_statements == 1);
    CHECK(r.output_statements == 1);
}

TEST_CASE("infinite loop times out") {
    ExecLimits lim;
    lim.step_limit = 1'000'000;
    auto r = run("int main(){while(true){} return 0;}", "", lim);
    CHECK(r.status == ExecStatus::Timeout);
    CHECK(r.steps <= lim.step_limit);
}

TEST_CASE("reading past the end of input") {
    auto r = run(prog("int main(){int x; cin>>x; return 0;}"));
    CHECK(r.status == ExecStatus::RuntimeError);
    CHECK(r.fault == RuntimeFault::InputExhausted);
}

TEST_CASE("runtime faults") {
    CHECK(run("int main(){int z=0; int x=1/z; return x;}").fault == RuntimeFault::DivZero);
    CHECK(run("int main(){int z=0; int x=1%z; return x;}").fault == RuntimeFault::DivZero);
    CHECK(run("int main(){int a[3]; a[3]=1; return 0;}").fault == RuntimeFault::IndexOutOfBounds);
    CHECK(run(prog("int main(){vector<int> v; v.push_back(1); return v[1];}")).fault == RuntimeFault::IndexOutOfBounds);
    CHECK(run("int f(int n){return f(n+1);} int main(){return f(0);}").status == ExecStatus::ResourceLimit);
}

TEST_CASE("output limit") {
    ExecLimits lim;
    lim.output_limit = 100;
    auto r = run(prog("int main(){while(true) cout<<\"xxxxxxxxxx\"; return 0;}"), "", lim);
    CHECK(r.status == ExecStatus::ResourceLimit);
    CHECK(r.stdout_text.size() == 100);
}

TEST_CASE("64-bit wrap-around") {
    auto r = run(prog("int main(){long long x=9223372036854775807LL; x=x+1; cout<<x; return 0;}"));
    CHECK(r.stdout_text == "-9223372036854775808");
    auto m = run(prog("int main(){long long x=-9223372036854775807LL-1; cout<<x/-1<<' '<<x*-1; return 0;}"));
    CHECK(m.stdout_text == "-9223372036854775808 -9223372036854775808");
}

TEST_CASE("double formatting uses six significant digits") {
    auto r = run(prog("int main(){double d=1.0/3; cout<<d<<' '<<2.5<<' '<<1e20<<' '<<100.0; return 0;}"));
    CHECK(r.stdout_text == "0.333333 2.5 1e+20 100");
    auto p = run(prog("int main(){double d=2.0/3; printf(\"%.3f %f\\n\", d, d); return 0;}"));
    CHECK(p.stdout_text == "0.667 0.666667\n");
}

TEST_CASE("printf and scanf") {
    auto r = run(prog("int main(){int n; long long m; char c; char buf; scanf(\"%d %lld %c\", &n, &m, &c); "
                      "printf(\"%d|%lld|%c|%s|%%|%5d\\n\", n, m*2, c, \"ok\", n); return 0;}"),
                 "7 10000000000 z");
    CHECK(r.ok());
    CHECK(r.stdout_text == "7|20000000000|z|ok|%|    7\n");
    CHECK(r.input_values == 3);
    auto eof = run(prog("int main(){int x=5; int k=scanf(\"%d\", &x); printf(\"%d %d\", k, x); return 0;}"));
    CHECK(eof.stdout_text == "-1 5");
}

TEST_CASE("scanf loop until end of input") {
    auto r = run(prog("int main(){int x,s=0; while(scanf(\"%d\",&x)==1) s+=x; printf(\"%d\\n\",s); return 0;}"), "1 2 3 4");
    CHECK(r.stdout_text == "10\n");
}

TEST_CASE("control flow") {
    auto r = run(prog(
        "int main(){int s=0; for(int i=0;i<10;i++){if(i==2) continue; if(i==6) break; s+=i;} "
        "int k=0; do{k++;}while(k<5); int w=0; while(1){w++; if(w>3) break;} cout<<s<<' '<<k<<' '<<w; return 0;}"));
    CHECK(r.stdout_text == "13 5 4");
}

TEST_CASE("functions, references and recursion") {
    auto r = run(prog(
        "int fib(int n){if(n<2) return n; return fib(n-1)+fib(n-2);} "
        "void bump(int &x){x+=10;} void fill(int a[], int n){for(int i=0;i<n;i++) a[i]=i*i;} "
        "void vcopy(vector<int> v){v[0]=99;} "
        "int main(){int y=1; bump(y); int a[4]; fill(a,4); vector<int> v(2,5); vcopy(v); "
        "cout<<fib(15)<<' '<<y<<' '<<a[3]<<' '<<v[0]; return 0;}"));
    CHECK(r.stdout_text == "610 11 9 5");
}

TEST_CASE("strings and vectors") {
    auto r = run(prog(
        "int main(){string s; cin>>s; s[0]='J'; s.push_back('!'); string t=s.substr(1,3)+\"-\"+s; "
        "vector<vector<int>> g(2, vector<int>(3, 1)); g[1][2]=7; vector<int> h=g[1]; h[0]=4; "
        "cout<<t<<' '<<s.size()<<' '<<g[1][0]<<g[1][2]<<h[0]<<' '<<(s==\"Java!\")<<endl; return 0;}"),
                 "java");
    CHECK(r.stdout_text == "ava-Java! 5 174 1\n");
}

TEST_CASE("builtins") {
    auto r = run(prog("int main(){int a=3,b=8; swap(a,b); cout<<min(a,b)<<max(a,b)<<abs(-4)<<' '<<sqrt(16.0)<<' '"
                      "<<max(1.5,2.0)<<' '<<std::min(2LL,3LL); return 0;}"));
    CHECK(r.stdout_text == "384 4 2 2");
}

TEST_CASE("globals, typedefs, ternary and conversions") {
    auto r = run(prog(
        "typedef long long ll; ll g=5; const int N=3; int arr[N]; "
        "int main(){ll x=g*2; int t=7/2; double d=7/2.0; char c='a'+1; bool b=x>3; int q=(int)d; "
        "arr[N-1]=x>9?1:2; cout<<x<<' '<<t<<' '<<d<<' '<<c<<' '<<b<<' '<<q<<' '<<arr[2]<<' '<<(-7/2)<<' '<<(-7%3); return 0;}"));
    CHECK(r.stdout_text == "10 3 3.5 b 1 3 1 -3 -1");
}

TEST_CASE("determinism over repeated runs") {
    std::string src = prog("int main(){int n; cin>>n; long long h=1; for(int i=0;i<n;i++) h=h*31+i; cout<<h; return 0;}");
    Ast a = parse_source(src);
    auto first = execute(a, "50");
    for (int i = 0; i < 100; ++i) CHECK(execute(a, "50") == first);
}

TEST_CASE("statement recognizers") {
    Ast a = parse_source(prog("int main(){int x; cin>>x; std::cout<<x; printf(\"%d\", x); x=1; return 0;}"));
    const auto& body = a.root.children.back().children.back().children;
    CHECK(is_input_statement(body[1]));
    CHECK(is_output_statement(body[2]));
    CHECK(is_output_statement(body[3]));
    CHECK_FALSE(is_output_statement(body[4]));
    CHECK_FALSE(is_input_statement(body[4]));
}
