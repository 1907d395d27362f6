import streamlit as st
import time
import matplotlib.pyplot as plt
import numpy as np

# Import Core Logic
try:
    from core import Guards, GuardExceeded, QuandleError
    from cli import format_quandle_file, pack_zip, parse_quandle_file
    from constructions import semiregular_extension
    from enumeration import enumerate_quasi_affine
    from recognition import PROPERTIES, check
except ImportError:
    st.error("Failed to import the quandle modules. Please run the app from the repository root.")
    st.stop()

# 1. Page Config
st.set_page_config(
    page_title="Quandle Explorer",
    page_icon="🔁",
    layout="wide",
    initial_sidebar_state="expanded"
)

# 2. Sidebar
with st.sidebar:
    st.title("🔧 Settings")

    st.markdown("### Properties")
    selected = st.multiselect(
        "Check",
        options=sorted(PROPERTIES),
        default=["quasi-affine", "affine", "medial", "latin"],
        help="Recognition checks to run on the uploaded table."
    )

    st.markdown("### Guards")
    enumerate_order = st.number_input(
        "Largest order to enumerate",
        min_value=1,
        max_value=64,
        value=Guards.enumerate_order,
        step=1,
        help="Enumeration is refused above this order."
    )
    jobs = st.slider(
        "Worker processes",
        min_value=1,
        max_value=8,
        value=1,
        step=1,
        help="Cells of the enumeration are split across this many processes."
    )

    guards = Guards(enumerate_order=int(enumerate_order))
    st.info(f"Enumeration guard: order ≤ {guards.enumerate_order}")

# 3. Main Area
st.title("Quandle Explorer 🔁")
st.markdown("""
    Upload a multiplication table to test whether it is a quandle and whether it is
    affine or quasi-affine, or enumerate the quasi-affine quandles of a given order.
""")

tab_check, tab_enum = st.tabs(["Check a table", "Enumerate"])


@st.cache_data(show_spinner=False)
def load_table(text):
    try:
        return parse_quandle_file(text)
    except QuandleError as e:
        return str(e)


@st.cache_data(show_spinner=False)
def run_enumeration(n, limit, n_jobs):
    return enumerate_quasi_affine(n, guards=Guards(enumerate_order=limit), jobs=n_jobs)


with tab_check:
    uploaded_file = st.file_uploader("Upload table file", type=["txt"])

    if uploaded_file:
        with st.spinner("Reading table..."):
            result = load_table(uploaded_file.getvalue().decode("utf-8"))

        if isinstance(result, str):
            st.error(f"Not a valid quandle table: {result}")
        else:
            q = result
            col1, col2 = st.columns([1, 1])

            with col1:
                st.subheader("📁 Table Stats")
                st.write(f"**Filename:** `{uploaded_file.name}`")
                st.metric("Order", q.n)
                st.metric("Orbits", len(q.orbit_blocks))
                st.write("**Orbit sizes:** " + ", ".join(str(len(b)) for b in q.orbit_blocks))

                for prop in selected:
                    report = check(q, prop)
                    if report.verdict:
                        st.success(f"{prop}: yes")
                    else:
                        st.warning(f"{prop}: no ({report.reason.value})")

            with col2:
                st.subheader("📐 Table")
                fig, ax = plt.subplots(figsize=(4, 4))
                ax.imshow(q.table, cmap="viridis", interpolation="nearest")
                if q.n <= 16:
                    for (y, x), v in np.ndenumerate(q.table):
                        ax.text(x, y, str(v), ha="center", va="center", color="white", fontsize=7)
                ax.set_xlabel("y")
                ax.set_ylabel("x")
                ax.set_title("x * y")
                st.pyplot(fig)
    else:
        st.info("👆 Upload a table file to get started.")

with tab_enum:
    n = st.number_input("Order n", min_value=1, max_value=64, value=8, step=1)
    kind = st.radio("Count", ["quasi-affine", "affine", "latin"], horizontal=True)

    if st.button("🔁 Enumerate", type="primary", use_container_width=True):
        status_container = st.status("Enumerating...", expanded=True)

        try:
            with status_container:
                start_time = time.time()
                result = run_enumeration(int(n), int(enumerate_order), jobs)
                st.write(f"✅ {len(result.cells)} cells done ({time.time() - start_time:.1f}s)")

                tables = {
                    f"quandle_{int(n)}_{idx:03d}.txt": semiregular_extension(cls.descriptor).quandle
                    for idx, cls in enumerate(result.classes(kind))
                }
                st.write(f"📦 Zipping {len(tables)} tables...")
                zip_data = pack_zip(tables)
                status_container.update(label="Enumeration Complete!", state="complete", expanded=False)

            breakdown = result.breakdown(kind)
            st.metric(f"{kind} quandles of order {int(n)}", sum(breakdown.values()))
            st.bar_chart({"count": {str(k): v for k, v in breakdown.items()}})

            st.download_button(
                label="⬇️ Download ZIP",
                data=zip_data,
                file_name=f"{kind}_order_{int(n)}.zip",
                mime="application/zip"
            )
            if tables:
                first = next(iter(tables.values()))
                st.code(format_quandle_file(first), language="text")

        except GuardExceeded as e:
            status_container.update(label="Refused", state="error")
            st.error(f"Order too large: {e}")
        except Exception as e:
            status_container.update(label="Failed", state="error")
            st.error(f"Enumeration Failed: {str(e)}")
