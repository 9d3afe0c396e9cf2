// Bootstrap: annotator name + task selection, then the labeling loop.

import { ApiClient } from "./api.js";
import { Task, TASK_CLASSES } from "./schema.js";
import { UiSession } from "./session.js";
import { mountAnnotator, UiHandles } from "./ui.js";

function start(): void {
  const form = document.getElementById("setup-form") as HTMLFormElement;
  const nameInput = document.getElementById("annotator-name") as HTMLInputElement;
  const taskSelect = document.getElementById("task-select") as HTMLSelectElement;
  const root = document.getElementById("annotator-root") as HTMLElement;

  for (const task of Object.keys(TASK_CLASSES)) {
    const option = document.createElement("option");
    option.value = task;
    option.textContent = task.replace("_", " ");
    taskSelect.appendChild(option);
  }

  let handles: UiHandles | null = null;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const annotator = nameInput.value.trim();
    if (!annotator) {
      nameInput.focus();
      return;
    }
    handles?.stop();
    const session = new UiSession(new ApiClient(""), taskSelect.value as Task, annotator);
    handles = mountAnnotator(document, root, session);
    form.style.display = "none";
    void session.refreshProgress().then(() => session.nextTile());
  });
}

document.addEventListener("DOMContentLoaded", start);
