import numpy as np
import pytest
from fastapi.testclient import TestClient

from citerank.ingest import synth_corpus
from citerank.service import SessionStore, create_app


@pytest.fixture(scope="module")
def corpus():
    return synth_corpus(1200, years=(1970, 2010), mean_refs=10.0, seed=19,
                        venues=5, community_bias=0.7, authors_per_venue=15)


@pytest.fixture(scope="module")
def client(corpus):
    return TestClient(create_app(corpus))


def bib_for(corpus, ids):
    entries = []
    for i, pid in enumerate(ids):
        m = corpus.meta(pid)
        entries.append(f"@article{{e{i}, title={{{m.title}}}, year={{{m.year}}}}}")
    return "\n".join(entries)


def open_session(client, corpus, ids):
    resp = client.post("/api/bibliography", content=bib_for(corpus, ids))
    assert resp.status_code == 200, resp.text
    return resp.json()


class TestHealth:
    def test_counts(self, client, corpus):
        got = client.get("/api/health").json()
        assert got == {
            "papers": corpus.n,
            "edges": corpus.n_edges,
            "venues": len(corpus.venue_names),
            "authors": len(corpus.author_names),
        }


class TestBibliography:
    def test_two_entries_resolve(self, client, corpus):
        body = open_session(client, corpus, [100, 200])
        assert len(body["seeds"]) == 2
        assert body["unmatched"] == []
        assert len(body["session_id"]) == 32

    def test_unknown_titles_go_unmatched(self, client, corpus):
        text = (bib_for(corpus, [50]) +
                "\n@misc{u, title={An Entirely Unknown Manuscript}, year={1980}}")
        body = client.post("/api/bibliography", content=text).json()
        assert body["unmatched"] == ["An Entirely Unknown Manuscript"]

    def test_all_unknown_is_422(self, client):
        resp = client.post(
            "/api/bibliography",
            content="@misc{u, title={Nothing Here Matches Anything}, year={1980}}")
        assert resp.status_code == 422
        assert resp.json()["detail"]["unmatched"]

    def test_parse_error_is_400(self, client):
        assert client.post("/api/bibliography", content="@article{x, title={oops").status_code == 400

    def test_empty_body_is_400(self, client):
        assert client.post("/api/bibliography", content="").status_code == 400

    def test_duplicate_entries_dedupe(self, client, corpus):
        text = bib_for(corpus, [100]) + "\n" + bib_for(corpus, [100])
        body = client.post("/api/bibliography", content=text).json()
        assert len(body["seeds"]) == 1

    def test_json_body_accepted(self, client, corpus):
        resp = client.post("/api/bibliography",
                           json={"text": bib_for(corpus, [100])})
        assert resp.status_code == 200


class TestSearch:
    def test_exact_title_first(self, client, corpus):
        title = corpus.meta(123).title
        got = client.get("/api/search", params={"q": title}).json()["results"]
        assert got[0]["id"] == corpus.key_of(123)

    def test_gibberish_empty(self, client):
        assert client.get("/api/search", params={"q": "zzqqxx yyzz"}).json()["results"] == []

    def test_empty_q_is_400(self, client):
        assert client.get("/api/search", params={"q": " "}).status_code == 400

    def test_fragment_matches_capped(self, client):
        got = client.get("/api/search", params={"q": "adaptive ranking"}).json()["results"]
        assert 0 < len(got) <= 20


class TestRecommend:
    def test_page_of_k_items_non_increasing(self, client, corpus):
        sid = open_session(client, corpus, [400, 410])["session_id"]
        body = client.post("/api/recommend", json={"session_id": sid, "k": 10}).json()
        assert len(body["items"]) == 10
        scores = [it["score"] for it in body["items"]]
        assert scores == sorted(scores, reverse=True)
        assert body["params"]["algorithm"] == "darwr"
        assert body["page"] == 1

    def test_unknown_session_404(self, client):
        assert client.post("/api/recommend", json={"session_id": "f" * 32}).status_code == 404

    def test_bad_lambda_400(self, client, corpus):
        sid = open_session(client, corpus, [400])["session_id"]
        resp = client.post("/api/recommend", json={"session_id": sid, "lambda": 1.5})
        assert resp.status_code == 400

    def test_bad_algorithm_400(self, client, corpus):
        sid = open_session(client, corpus, [400])["session_id"]
        assert client.post("/api/recommend",
                           json={"session_id": sid, "algorithm": "magic"}).status_code == 400

    def test_lambda_raises_mean_year(self, client, corpus):
        # two fresh sessions with the same seeds; recent-biased walk must
        # surface later papers on its first page
        seeds = [600, 650, 700]
        years = {}
        for lam in (0.1, 0.9):
            sid = open_session(client, corpus, seeds)["session_id"]
            body = client.post("/api/recommend",
                               json={"session_id": sid, "lambda": lam, "k": 10}).json()
            ys = [it["year"] for it in body["items"] if it["year"]]
            years[lam] = float(np.mean(ys))
        assert years[0.9] > years[0.1]

    def test_venue_and_expert_targets(self, client, corpus):
        sid = open_session(client, corpus, [500, 510])["session_id"]
        venues = client.post("/api/recommend",
                             json={"session_id": sid, "target": "venues", "k": 3}).json()
        assert len(venues["items"]) == 3
        assert all("name" in it for it in venues["items"])
        experts = client.post("/api/recommend",
                              json={"session_id": sid, "target": "experts", "k": 5}).json()
        assert len(experts["items"]) == 5

    def test_unknown_target_400(self, client, corpus):
        sid = open_session(client, corpus, [400])["session_id"]
        assert client.post("/api/recommend",
                           json={"session_id": sid, "target": "poems"}).status_code == 400

    def test_time_budget_503(self, corpus):
        tight = TestClient(create_app(corpus, time_budget=0.0))
        sid = open_session(tight, corpus, [400])["session_id"]
        resp = tight.post("/api/recommend", json={"session_id": sid})
        assert resp.status_code == 503
        assert "Retry-After" in resp.headers


class TestFeedback:
    def test_irrelevant_never_reappears(self, client, corpus):
        sid = open_session(client, corpus, [800, 810])["session_id"]
        first = client.post("/api/recommend", json={"session_id": sid, "k": 5}).json()
        victim = first["items"][0]["id"]
        body = client.post("/api/feedback",
                           json={"session_id": sid, "relevant": [],
                                 "irrelevant": [victim]}).json()
        assert body["ok"] and body["irrelevant_count"] == 1
        seen = {it["id"] for it in body["page"]}
        for _ in range(5):
            page = client.post("/api/recommend",
                               json={"session_id": sid, "k": 5}).json()["items"]
            ids = {it["id"] for it in page}
            assert victim not in ids
            assert not ids & seen
            seen |= ids

    def test_relevant_id_joins_seeds(self, client, corpus):
        sid = open_session(client, corpus, [800])["session_id"]
        first = client.post("/api/recommend", json={"session_id": sid, "k": 5}).json()
        chosen = first["items"][0]["id"]
        client.post("/api/feedback",
                    json={"session_id": sid, "relevant": [chosen], "irrelevant": []})
        state = client.get(f"/api/session/{sid}").json()
        assert chosen in {s["id"] for s in state["seeds"]}
        assert state["relevant_count"] == 1

    def test_overlap_is_409(self, client, corpus):
        sid = open_session(client, corpus, [800])["session_id"]
        first = client.post("/api/recommend", json={"session_id": sid, "k": 5}).json()
        pid = first["items"][0]["id"]
        resp = client.post("/api/feedback",
                           json={"session_id": sid, "relevant": [pid], "irrelevant": [pid]})
        assert resp.status_code == 409

    def test_unshown_is_400(self, client, corpus):
        sid = open_session(client, corpus, [800])["session_id"]
        unseen = corpus.key_of(0)
        resp = client.post("/api/feedback",
                           json={"session_id": sid, "relevant": [unseen], "irrelevant": []})
        assert resp.status_code == 400

    def test_empty_body_is_400(self, client, corpus):
        sid = open_session(client, corpus, [800])["session_id"]
        resp = client.post("/api/feedback",
                           json={"session_id": sid, "relevant": [], "irrelevant": []})
        assert resp.status_code == 400


class TestSessionEndpoint:
    def test_fresh_session_state(self, client, corpus):
        sid = open_session(client, corpus, [300, 310])["session_id"]
        state = client.get(f"/api/session/{sid}").json()
        assert state["relevant_count"] == 0
        assert state["irrelevant_count"] == 0
        assert state["pages_served"] == 0
        assert len(state["seeds"]) == 2

    def test_counts_after_feedback(self, client, corpus):
        sid = open_session(client, corpus, [300])["session_id"]
        first = client.post("/api/recommend", json={"session_id": sid, "k": 4}).json()
        ids = [it["id"] for it in first["items"]]
        client.post("/api/feedback",
                    json={"session_id": sid, "relevant": [ids[0]], "irrelevant": [ids[1]]})
        state = client.get(f"/api/session/{sid}").json()
        assert state["relevant_count"] == 1 and state["irrelevant_count"] == 1
        assert state["pages_served"] == 2  # feedback returns a refreshed page

    def test_unknown_id_404(self, client):
        assert client.get("/api/session/deadbeef").status_code == 404

    def test_expiry(self, corpus):
        app = create_app(corpus, ttl_seconds=0.0)
        c = TestClient(app)
        sid = open_session(c, corpus, [300])["session_id"]
        assert c.get(f"/api/session/{sid}").status_code == 404


class TestSessionStore:
    def test_sweep_removes_expired(self):
        store = SessionStore(ttl_seconds=0.0)
        store.create(lambda sid: type("S", (), {"session_id": sid})())
        assert len(store) == 1
        store.sweep()
        assert len(store) == 0


class TestDeterminism:
    def test_replay_reproduces_responses(self, corpus):
        # same corpus, same requests -> identical payloads (session id aside)
        out = []
        for _ in range(2):
            c = TestClient(create_app(corpus))
            sid = open_session(c, corpus, [420, 430])["session_id"]
            page = c.post("/api/recommend",
                          json={"session_id": sid, "k": 8, "lambda": 0.7}).json()
            out.append(page["items"])
        assert out[0] == out[1]
