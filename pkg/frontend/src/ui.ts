// DOM layer: renders the session state and wires keyboard/buttons.

import { UiSession } from "./session.js";
import { keyBindings } from "./schema.js";

export const PROGRESS_POLL_MS = 5000;
export const LEASE_CHECK_MS = 1000;

export interface UiHandles {
  session: UiSession;
  stop: () => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mountAnnotator(doc: Document, root: HTMLElement, session: UiSession): UiHandles {
  root.innerHTML = "";

  const banner = el(doc, "div", "banner");
  const stage = el(doc, "div", "stage");
  const image = el(doc, "img", "tile-image") as HTMLImageElement;
  image.alt = "roof tile";
  const status = el(doc, "div", "status");
  const buttons = el(doc, "div", "buttons");
  const progressBar = el(doc, "div", "progress-bar");
  const progressFill = el(doc, "div", "progress-fill");
  progressBar.appendChild(progressFill);
  const progressText = el(doc, "div", "progress-text");
  const perClass = el(doc, "ul", "per-class");

  stage.append(image, status);
  root.append(banner, stage, buttons, progressBar, progressText, perClass);

  function render(): void {
    banner.textContent = session.banner ?? "";
    banner.style.display = session.banner ? "block" : "none";

    buttons.innerHTML = "";
    if (session.state.kind === "labeling") {
      const lease = session.state.lease;
      image.src = lease.imageUrl;
      image.style.display = "";
      status.textContent = `Tile ${lease.tileId}`;
      for (const [key, cls] of keyBindings(lease.classes)) {
        const button = el(doc, "button", "class-button", `${key} ${cls}`);
        button.dataset.label = cls;
        button.addEventListener("click", () => void session.submitLabel(cls));
        buttons.appendChild(button);
      }
      const skip = el(doc, "button", "skip-button", "0 Skip");
      skip.addEventListener("click", () => void session.skip());
      buttons.appendChild(skip);
    } else {
      image.style.display = "none";
      image.removeAttribute("src");
      status.textContent =
        session.state.kind === "done"
          ? "All tiles labeled. Thank you!"
          : session.state.kind === "waiting"
            ? `Waiting: ${session.state.pending} tile(s) leased to other annotators`
            : "Loading…";
    }

    const progress = session.progress;
    if (progress) {
      const fraction = progress.total > 0 ? progress.labeled / progress.total : 0;
      progressFill.style.width = `${(fraction * 100).toFixed(1)}%`;
      progressText.textContent = `${progress.labeled} / ${progress.total} labeled`;
      perClass.innerHTML = "";
      for (const [cls, count] of Object.entries(progress.per_class)) {
        perClass.appendChild(el(doc, "li", "per-class-item", `${cls}: ${count}`));
      }
    }
  }

  session.onChange(render);

  const onKey = (event: Event): void => {
    const key = (event as KeyboardEvent).key;
    void session.handleKey(key);
  };
  doc.addEventListener("keydown", onKey);

  const pollTimer = setInterval(() => void session.refreshProgress(), PROGRESS_POLL_MS);
  const leaseTimer = setInterval(() => void session.checkLease(), LEASE_CHECK_MS);

  render();
  return {
    session,
    stop: () => {
      clearInterval(pollTimer);
      clearInterval(leaseTimer);
      doc.removeEventListener("keydown", onKey);
    },
  };
}
