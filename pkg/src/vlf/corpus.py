"""Labeled desk-scale corpus generation and splitting.

One template family serves three purposes: the synthetic training corpus
(separable by structural sink patterns plus the stub embedder's marker
signal), the bundled seeded corpus for validation and repair runs, and the
"safe shapes" the repair templates rewrite into (parameterized queries,
argument vectors, canonical-path guards, allow-list unpicklers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedder import EmbedderConfig, embed_source
from .errors import VlfError
from .fusion import FusionSample
from .graph import build_graph
from .uast.parse import parse_to_uast
from .uast.types import Language
from .validation.types import VulnClass

_FN_NAMES = ["fetch_record", "load_entry", "handle_request"]
_ARG_NAMES = ["user_id", "name", "token"]
_TABLES = ["users", "orders", "accounts"]
_COLUMNS = ["email", "status", "owner"]
_COMMANDS = ["ping -c 1", "host", "nslookup"]
_BASES = ["data", "uploads", "archive"]


@dataclass(frozen=True)
class CorpusSample:
    name: str
    source: str
    language: Language
    label: int
    vuln_class: VulnClass | None

    def to_label_json(self) -> dict:
        return {
            "label": self.label,
            "vuln_class": self.vuln_class.value if self.vuln_class else None,
            "language": self.language.value,
        }


def _pick(rng: np.random.Generator, pool: list[str]) -> str:
    return pool[int(rng.integers(0, len(pool)))]


# --- python templates ---

def _py_sql_vulnerable(rng) -> str:
    fn, arg, table, col, key = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _TABLES), _pick(rng, _COLUMNS), _pick(rng, _ARG_NAMES)
    return f'''import sqlite3
import sys


def {fn}(cur, {arg}):
    query = "SELECT {col} FROM {table} WHERE {key} = '" + {arg} + "'"
    cur.execute(query)
    audit = "INSERT INTO audit_log (entry) VALUES ('" + {arg} + "')"
    cur.execute(audit)
    trace = "UPDATE {table} SET {col} = {col} WHERE {key} = '" + {arg} + "'"
    cur.execute(trace)
    return cur.fetchall()


if __name__ == "__main__":
    db = sqlite3.connect(":memory:")
    db.execute("CREATE TABLE {table} ({key} TEXT, {col} TEXT)")
    db.execute("CREATE TABLE audit_log (entry TEXT)")
    print({fn}(db.cursor(), sys.argv[1]))
'''


def _py_sql_safe(rng) -> str:
    fn, arg, table, col, key = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _TABLES), _pick(rng, _COLUMNS), _pick(rng, _ARG_NAMES)
    return f'''import sqlite3
import sys


def {fn}(cur, {arg}):
    query = "SELECT {col} FROM {table} WHERE {key} = ?"
    cur.execute(query, ({arg},))
    audit = "INSERT INTO audit_log (entry) VALUES (?)"
    cur.execute(audit, ({arg},))
    trace = "UPDATE {table} SET {col} = {col} WHERE {key} = ?"
    cur.execute(trace, ({arg},))
    return cur.fetchall()


if __name__ == "__main__":
    db = sqlite3.connect(":memory:")
    db.execute("CREATE TABLE {table} ({key} TEXT, {col} TEXT)")
    db.execute("CREATE TABLE audit_log (entry TEXT)")
    print({fn}(db.cursor(), sys.argv[1]))
'''


def _py_cmd_vulnerable(rng) -> str:
    fn, arg, cmd, base = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _COMMANDS), _pick(rng, _BASES)
    return f'''import os
import sys


def {fn}({arg}):
    status = os.system("{cmd} " + {arg})
    os.system("logger -t {base} " + {arg})
    report = "host " + {arg}
    os.system(report)
    return status


if __name__ == "__main__":
    print({fn}(sys.argv[1]))
'''


def _py_cmd_safe(rng) -> str:
    fn, arg, cmd, base = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _COMMANDS), _pick(rng, _BASES)
    vector = ", ".join(json.dumps(tok) for tok in cmd.split())
    return f'''import subprocess
import sys


def {fn}({arg}):
    status = subprocess.run([{vector}, {arg}], check=False).returncode
    subprocess.run(["logger", "-t", "{base}", {arg}], check=False)
    report = ["host", {arg}]
    subprocess.run(report, check=False)
    return status


if __name__ == "__main__":
    print({fn}(sys.argv[1]))
'''


def _py_path_vulnerable(rng) -> str:
    fn, arg, base = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _BASES)
    return f'''import os
import sys


def {fn}({arg}):
    target = "{base}/" + {arg}
    fh = open(target)
    data = fh.read()
    fh.close()
    log = open("{base}/log/" + {arg})
    log.close()
    meta = open("{base}/meta/" + {arg})
    meta.close()
    return data


if __name__ == "__main__":
    print({fn}(sys.argv[1]))
'''


def _py_path_safe(rng) -> str:
    fn, arg, base = _pick(rng, _FN_NAMES), _pick(rng, _ARG_NAMES), _pick(rng, _BASES)
    return f'''import os
import sys


def {fn}({arg}):
    base = os.path.realpath("{base}")
    target = os.path.realpath(os.path.join(base, {arg}))
    if not target.startswith(base + os.sep):
        raise ValueError("rejected")
    if not os.path.exists(target):
        return ""
    fh = open(target)
    data = fh.read()
    fh.close()
    return data


if __name__ == "__main__":
    print({fn}(sys.argv[1]))
'''


def _py_deser_vulnerable(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    return f'''import pickle
import sys


def {fn}(blob):
    data = blob.encode("latin-1")
    head = pickle.loads(data)
    body = pickle.loads(data)
    return head, body


if __name__ == "__main__":
    print(repr({fn}(sys.argv[1])))
'''


def _py_deser_safe_json(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    return f'''import json
import sys


def {fn}(blob):
    head = json.loads(blob)
    body = json.loads(blob)
    return head, body


if __name__ == "__main__":
    print(repr({fn}(sys.argv[1])))
'''


def _py_deser_safe_allowlist(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    return f'''import io
import pickle
import sys


class SafeUnpickler(pickle.Unpickler):
    ALLOWED = {{("builtins", "dict"), ("builtins", "list"), ("builtins", "str"), ("builtins", "int")}}

    def find_class(self, module, name):
        if (module, name) not in self.ALLOWED:
            raise pickle.UnpicklingError("blocked type")
        return super().find_class(module, name)


def {fn}(blob):
    return SafeUnpickler(io.BytesIO(blob.encode("latin-1"))).load()


if __name__ == "__main__":
    print(repr({fn}(sys.argv[1])))
'''


def _py_util_safe(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    k = int(rng.integers(2, 9))
    return f'''import sys


def {fn}(values):
    total = 0
    for item in values:
        total += item * {k}
    return total


if __name__ == "__main__":
    print({fn}([int(x) for x in sys.argv[1:]]))
'''


# --- java templates ---

def _java_sql_vulnerable(rng) -> str:
    arg, table, col, key = _pick(rng, _ARG_NAMES), _pick(rng, _TABLES), _pick(rng, _COLUMNS), _pick(rng, _ARG_NAMES)
    return f'''import java.sql.*;

public class Target {{
    static ResultSet find(Statement stmt, String {arg}) throws Exception {{
        String query = "SELECT {col} FROM {table} WHERE {key} = '" + {arg} + "'";
        ResultSet rows = stmt.executeQuery(query);
        String audit = "INSERT INTO audit_log (entry) VALUES ('" + {arg} + "')";
        stmt.executeUpdate(audit);
        String trace = "UPDATE {table} SET {col} = {col} WHERE {key} = '" + {arg} + "'";
        stmt.executeUpdate(trace);
        return rows;
    }}

    public static void main(String[] args) throws Exception {{
        Connection conn = DriverManager.getConnection("jdbc:sqlite::memory:");
        find(conn.createStatement(), args[0]);
    }}
}}
'''


def _java_sql_safe(rng) -> str:
    arg, table, col, key = _pick(rng, _ARG_NAMES), _pick(rng, _TABLES), _pick(rng, _COLUMNS), _pick(rng, _ARG_NAMES)
    return f'''import java.sql.*;

public class Target {{
    static ResultSet find(Connection conn, String {arg}) throws Exception {{
        PreparedStatement query = conn.prepareStatement("SELECT {col} FROM {table} WHERE {key} = ?");
        query.setString(1, {arg});
        ResultSet rows = query.executeQuery();
        PreparedStatement audit = conn.prepareStatement("INSERT INTO audit_log (entry) VALUES (?)");
        audit.setString(1, {arg});
        audit.executeUpdate();
        PreparedStatement trace = conn.prepareStatement("UPDATE {table} SET {col} = {col} WHERE {key} = ?");
        trace.setString(1, {arg});
        trace.executeUpdate();
        return rows;
    }}

    public static void main(String[] args) throws Exception {{
        Connection conn = DriverManager.getConnection("jdbc:sqlite::memory:");
        find(conn, args[0]);
    }}
}}
'''


def _java_cmd_vulnerable(rng) -> str:
    arg, cmd = _pick(rng, _ARG_NAMES), _pick(rng, _COMMANDS)
    return f'''public class Target {{
    static int probe(String {arg}) throws Exception {{
        Process proc = Runtime.getRuntime().exec("{cmd} " + {arg});
        proc.waitFor();
        Runtime.getRuntime().exec("logger -t probe " + {arg}).waitFor();
        Process note = Runtime.getRuntime().exec("host " + {arg});
        return note.waitFor();
    }}

    public static void main(String[] args) throws Exception {{
        System.out.println(probe(args[0]));
    }}
}}
'''


def _java_cmd_safe(rng) -> str:
    arg, cmd = _pick(rng, _ARG_NAMES), _pick(rng, _COMMANDS)
    vector = ", ".join(f'"{tok}"' for tok in cmd.split())
    return f'''public class Target {{
    static int probe(String {arg}) throws Exception {{
        Process proc = new ProcessBuilder({vector}, {arg}).start();
        proc.waitFor();
        new ProcessBuilder("logger", "-t", "probe", {arg}).start().waitFor();
        Process note = new ProcessBuilder("host", {arg}).start();
        return note.waitFor();
    }}

    public static void main(String[] args) throws Exception {{
        System.out.println(probe(args[0]));
    }}
}}
'''


def _java_path_vulnerable(rng) -> str:
    arg, base = _pick(rng, _ARG_NAMES), _pick(rng, _BASES)
    return f'''import java.io.FileInputStream;

public class Target {{
    static int size(String {arg}) throws Exception {{
        FileInputStream in = new FileInputStream("{base}/" + {arg});
        int total = in.available();
        in.close();
        FileInputStream bak = new FileInputStream("{base}/backup/" + {arg});
        total += bak.available();
        bak.close();
        FileInputStream meta = new FileInputStream("{base}/meta/" + {arg});
        total += meta.available();
        meta.close();
        return total;
    }}

    public static void main(String[] args) throws Exception {{
        System.out.println(size(args[0]));
    }}
}}
'''


def _java_path_safe(rng) -> str:
    arg, base = _pick(rng, _ARG_NAMES), _pick(rng, _BASES)
    return f'''import java.io.File;
import java.io.FileInputStream;

public class Target {{
    static int size(String {arg}) throws Exception {{
        File root = new File("{base}").getCanonicalFile();
        File target = new File(root, {arg}).getCanonicalFile();
        if (!target.getPath().startsWith(root.getPath() + File.separator)) {{
            throw new IllegalArgumentException("rejected");
        }}
        FileInputStream in = new FileInputStream(target);
        int total = in.available();
        in.close();
        return total;
    }}

    public static void main(String[] args) throws Exception {{
        System.out.println(size(args[0]));
    }}
}}
'''


def _java_deser_vulnerable(rng) -> str:
    return '''import java.io.ByteArrayInputStream;
import java.io.ObjectInputStream;
import java.util.Base64;

public class Target {
    static Object restore(String blob) throws Exception {
        byte[] raw = Base64.getDecoder().decode(blob);
        ObjectInputStream in = new ObjectInputStream(new ByteArrayInputStream(raw));
        Object head = in.readObject();
        Object body = in.readObject();
        return head != null ? head : body;
    }

    public static void main(String[] args) throws Exception {
        System.out.println(restore(args[0]));
    }
}
'''


def _java_util_safe(rng) -> str:
    k = int(rng.integers(2, 9))
    return f'''public class Target {{
    static long tally(String[] items) {{
        long total = 0;
        for (String item : items) {{
            total += Long.parseLong(item) * {k};
        }}
        return total;
    }}

    public static void main(String[] args) {{
        System.out.println(tally(args));
    }}
}}
'''


# --- c++ templates ---

def _cpp_mem_vulnerable(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    n = int(rng.choice([32, 64]))
    return f'''#include <cstdio>
#include <cstring>

void {fn}(const char *input) {{
    char buffer[{n}];
    strcpy(buffer, input);
    char line[{n}];
    sprintf(line, "entry-%s", input);
    strcat(buffer, line);
    printf("%s\\n", buffer);
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_mem_safe(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    n = int(rng.choice([32, 64]))
    return f'''#include <cstdio>
#include <cstring>

void {fn}(const char *input) {{
    char buffer[{n}];
    strncpy(buffer, input, sizeof(buffer) - 1);
    buffer[sizeof(buffer) - 1] = '\\0';
    char line[{n}];
    snprintf(line, sizeof(line), "entry-%s", buffer);
    strncat(buffer, line, sizeof(buffer) - strlen(buffer) - 1);
    printf("%s\\n", buffer);
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_sprintf_vulnerable(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    n = int(rng.choice([24, 48]))
    return f'''#include <cstdio>

void {fn}(const char *input) {{
    char line[{n}];
    sprintf(line, "record-%s", input);
    char copy[{n}];
    sprintf(copy, "copy-%s", line);
    printf("%s %s\\n", line, copy);
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_snprintf_safe(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    n = int(rng.choice([24, 48]))
    return f'''#include <cstdio>

void {fn}(const char *input) {{
    char line[{n}];
    snprintf(line, sizeof(line), "record-%s", input);
    char copy[{n}];
    snprintf(copy, sizeof(copy), "copy-%s", line);
    printf("%s %s\\n", line, copy);
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_cmd_vulnerable(rng) -> str:
    fn, cmd = _pick(rng, _FN_NAMES), _pick(rng, _COMMANDS)
    return f'''#include <cstdlib>
#include <string>

int {fn}(const std::string &target) {{
    std::string command = "{cmd} " + target;
    int status = system(command.c_str());
    std::string note = "logger -t probe " + target;
    system(note.c_str());
    std::string report = "host " + target;
    system(report.c_str());
    return status;
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        return {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_path_vulnerable(rng) -> str:
    fn, base = _pick(rng, _FN_NAMES), _pick(rng, _BASES)
    return f'''#include <cstdio>
#include <string>

int {fn}(const std::string &name) {{
    std::string path = "{base}/" + name;
    FILE *fh = fopen(path.c_str(), "r");
    if (fh != nullptr) {{
        fclose(fh);
    }}
    std::string backup = "{base}/backup/" + name;
    FILE *bh = fopen(backup.c_str(), "r");
    if (bh != nullptr) {{
        fclose(bh);
    }}
    std::string meta = "{base}/meta/" + name;
    FILE *mh = fopen(meta.c_str(), "r");
    if (mh == nullptr) {{
        return 1;
    }}
    fclose(mh);
    return 0;
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        return {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_path_safe(rng) -> str:
    fn, base = _pick(rng, _FN_NAMES), _pick(rng, _BASES)
    return f'''#include <cstdio>
#include <cstring>
#include <string>

int {fn}(const std::string &name) {{
    if (strstr(name.c_str(), "..") != nullptr) {{
        return 2;
    }}
    if (name.empty() || name[0] == '/') {{
        return 2;
    }}
    char path[256];
    snprintf(path, sizeof(path), "{base}/%s", name.c_str());
    FILE *fh = fopen(path, "r");
    if (fh == nullptr) {{
        return 1;
    }}
    fclose(fh);
    return 0;
}}

int main(int argc, char **argv) {{
    if (argc > 1) {{
        return {fn}(argv[1]);
    }}
    return 0;
}}
'''


def _cpp_util_safe(rng) -> str:
    fn = _pick(rng, _FN_NAMES)
    k = int(rng.integers(2, 9))
    return f'''#include <cstdio>
#include <cstdlib>

long {fn}(int count, char **items) {{
    long total = 0;
    for (int i = 0; i < count; ++i) {{
        total += strtol(items[i], nullptr, 10) * {k};
    }}
    return total;
}}

int main(int argc, char **argv) {{
    printf("%ld\\n", {fn}(argc - 1, argv + 1));
    return 0;
}}
'''


_TEMPLATES: list[tuple[Language, int, VulnClass | None, object]] = [
    (Language.PYTHON, 1, VulnClass.SQL_INJECTION, _py_sql_vulnerable),
    (Language.PYTHON, 1, VulnClass.COMMAND_INJECTION, _py_cmd_vulnerable),
    (Language.PYTHON, 1, VulnClass.PATH_TRAVERSAL, _py_path_vulnerable),
    (Language.PYTHON, 1, VulnClass.INSECURE_DESERIALIZATION, _py_deser_vulnerable),
    (Language.PYTHON, 0, None, _py_sql_safe),
    (Language.PYTHON, 0, None, _py_cmd_safe),
    (Language.PYTHON, 0, None, _py_path_safe),
    (Language.PYTHON, 0, None, _py_deser_safe_json),
    (Language.PYTHON, 0, None, _py_deser_safe_allowlist),
    (Language.PYTHON, 0, None, _py_util_safe),
    (Language.JAVA, 1, VulnClass.SQL_INJECTION, _java_sql_vulnerable),
    (Language.JAVA, 1, VulnClass.COMMAND_INJECTION, _java_cmd_vulnerable),
    (Language.JAVA, 1, VulnClass.PATH_TRAVERSAL, _java_path_vulnerable),
    (Language.JAVA, 1, VulnClass.INSECURE_DESERIALIZATION, _java_deser_vulnerable),
    (Language.JAVA, 0, None, _java_sql_safe),
    (Language.JAVA, 0, None, _java_cmd_safe),
    (Language.JAVA, 0, None, _java_path_safe),
    (Language.JAVA, 0, None, _java_util_safe),
    (Language.CPP, 1, VulnClass.MEMORY_CORRUPTION, _cpp_mem_vulnerable),
    (Language.CPP, 1, VulnClass.MEMORY_CORRUPTION, _cpp_sprintf_vulnerable),
    (Language.CPP, 1, VulnClass.COMMAND_INJECTION, _cpp_cmd_vulnerable),
    (Language.CPP, 1, VulnClass.PATH_TRAVERSAL, _cpp_path_vulnerable),
    (Language.CPP, 0, None, _cpp_mem_safe),
    (Language.CPP, 0, None, _cpp_snprintf_safe),
    (Language.CPP, 0, None, _cpp_path_safe),
    (Language.CPP, 0, None, _cpp_util_safe),
]

_EXT = {Language.PYTHON: "py", Language.JAVA: "java", Language.CPP: "cpp"}

# Vulnerable/safe counterparts generated from identical name draws, mirroring
# the paired-with-fixes corpus design: identifier noise carries no label
# signal, only the sink pattern differs.
_PAIR_FAMILIES: dict[Language, list[tuple[object, object, VulnClass]]] = {
    Language.PYTHON: [
        (_py_sql_vulnerable, _py_sql_safe, VulnClass.SQL_INJECTION),
        (_py_cmd_vulnerable, _py_cmd_safe, VulnClass.COMMAND_INJECTION),
        (_py_path_vulnerable, _py_path_safe, VulnClass.PATH_TRAVERSAL),
        (_py_deser_vulnerable, _py_deser_safe_json, VulnClass.INSECURE_DESERIALIZATION),
        (_py_deser_vulnerable, _py_deser_safe_allowlist, VulnClass.INSECURE_DESERIALIZATION),
    ],
    Language.JAVA: [
        (_java_sql_vulnerable, _java_sql_safe, VulnClass.SQL_INJECTION),
        (_java_cmd_vulnerable, _java_cmd_safe, VulnClass.COMMAND_INJECTION),
        (_java_path_vulnerable, _java_path_safe, VulnClass.PATH_TRAVERSAL),
        (_java_deser_vulnerable, _java_util_safe, VulnClass.INSECURE_DESERIALIZATION),
    ],
    Language.CPP: [
        (_cpp_mem_vulnerable, _cpp_mem_safe, VulnClass.MEMORY_CORRUPTION),
        (_cpp_sprintf_vulnerable, _cpp_snprintf_safe, VulnClass.MEMORY_CORRUPTION),
        (_cpp_cmd_vulnerable, _cpp_util_safe, VulnClass.COMMAND_INJECTION),
        (_cpp_path_vulnerable, _cpp_path_safe, VulnClass.PATH_TRAVERSAL),
    ],
}


def generate_samples(count: int, seed: int) -> list[CorpusSample]:
    """Balanced labeled corpus of vulnerable/fixed pairs across languages."""
    languages = [Language.PYTHON, Language.JAVA, Language.CPP]
    samples: list[CorpusSample] = []
    pair_index = 0
    while len(samples) < count:
        language = languages[pair_index % 3]
        families = _PAIR_FAMILIES[language]
        vuln_fn, safe_fn, vuln_class = families[(pair_index // 3) % len(families)]
        # identical draw streams: the pair shares every name pick
        rng_v = np.random.default_rng((seed, pair_index))
        rng_s = np.random.default_rng((seed, pair_index))
        samples.append(CorpusSample(
            name=f"sample_{len(samples):04d}_{language.value}_vuln.{_EXT[language]}",
            source=vuln_fn(rng_v), language=language, label=1, vuln_class=vuln_class,
        ))
        if len(samples) < count:
            samples.append(CorpusSample(
                name=f"sample_{len(samples):04d}_{language.value}_safe.{_EXT[language]}",
                source=safe_fn(rng_s), language=language, label=0, vuln_class=None,
            ))
        pair_index += 1
    return samples


def seed_corpus(out_dir: str | Path, seed: int = 20260801) -> list[CorpusSample]:
    """Write the bundled desk corpus: 11 vulnerable + 11 safe per language."""
    rng = np.random.default_rng(seed)
    per_language = {
        Language.PYTHON: {
            1: [_py_sql_vulnerable] * 3 + [_py_cmd_vulnerable] * 3 + [_py_path_vulnerable] * 3 + [_py_deser_vulnerable] * 2,
            0: [_py_sql_safe] * 3 + [_py_cmd_safe] * 2 + [_py_path_safe] * 2 + [_py_deser_safe_json] * 2 + [_py_deser_safe_allowlist] + [_py_util_safe],
        },
        Language.JAVA: {
            1: [_java_sql_vulnerable] * 3 + [_java_cmd_vulnerable] * 3 + [_java_path_vulnerable] * 3 + [_java_deser_vulnerable] * 2,
            0: [_java_sql_safe] * 3 + [_java_cmd_safe] * 3 + [_java_path_safe] * 3 + [_java_util_safe] * 2,
        },
        Language.CPP: {
            1: [_cpp_mem_vulnerable] * 4 + [_cpp_sprintf_vulnerable] * 2 + [_cpp_cmd_vulnerable] * 3 + [_cpp_path_vulnerable] * 2,
            0: [_cpp_mem_safe] * 4 + [_cpp_snprintf_safe] * 2 + [_cpp_path_safe] * 3 + [_cpp_util_safe] * 2,
        },
    }
    class_of = {fn: vc for _, _, vc, fn in _TEMPLATES}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    samples: list[CorpusSample] = []
    labels: dict[str, dict] = {}
    for language, groups in per_language.items():
        for label, fns in groups.items():
            for i, fn in enumerate(fns):
                name = f"{language.value}_{'vuln' if label else 'safe'}_{i:02d}.{_EXT[language]}"
                sample = CorpusSample(
                    name=name, source=fn(rng), language=language,
                    label=label, vuln_class=class_of.get(fn),
                )
                (out / name).write_text(sample.source, encoding="utf-8")
                labels[name] = sample.to_label_json()
                samples.append(sample)
    (out / "labels.json").write_text(json.dumps(labels, indent=2, sort_keys=True), encoding="utf-8")
    return samples


def split_corpus(count: int, seed: int) -> tuple[list[int], list[int], list[int]]:
    """Deterministic 80/10/10 train/val/test index split."""
    rng = np.random.default_rng(seed)
    perm = list(rng.permutation(count))
    n_train = int(round(count * 0.8))
    n_val = int(round(count * 0.1))
    train = sorted(perm[:n_train])
    val = sorted(perm[n_train : n_train + n_val])
    test = sorted(perm[n_train + n_val :])
    return train, val, test


def featurize_samples(
    samples: list[CorpusSample], embedder_cfg: EmbedderConfig | None = None
) -> list[FusionSample]:
    cfg = embedder_cfg or EmbedderConfig()
    out: list[FusionSample] = []
    for sample in samples:
        doc = parse_to_uast(sample.source.encode("utf-8"), sample.language)
        if doc.has_errors:
            raise VlfError(f"corpus template produced unparseable source: {sample.name}")
        graph = build_graph(doc)
        semantic = embed_source(sample.source, cfg).vector
        out.append(FusionSample(graph=graph, semantic=semantic, label=sample.label, sample_id=sample.name))
    return out
