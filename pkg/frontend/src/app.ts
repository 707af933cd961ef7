/** Wire a controller to a root element with full re-render on change. */

import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import { render } from "./render.js";

export function createApp(root: HTMLElement, baseUrl = ""): Controller {
  const controller: Controller = new Controller(new ApiClient(baseUrl), () =>
    render(root, controller),
  );
  render(root, controller);
  return controller;
}
